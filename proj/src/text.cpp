#include "specmine/text.h"

#include <cctype>
#include <sstream>

namespace specmine {
namespace {

bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(to_lower(current));
    current.clear();
  };
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    char c = chunk[i];
    if (!current.empty()) {
      char prev = current.back();
      bool boundary = false;
      if (is_digit(c) != is_digit(prev)) {
        boundary = true;
      } else if (is_upper(c) && is_lower(prev)) {
        boundary = true;
      } else if (is_upper(c) && is_upper(prev) && i + 1 < chunk.size() && is_lower(chunk[i + 1])) {
        // end of an acronym run: "HTTPServer" splits before the 'S'
        boundary = true;
      }
      if (boundary) flush();
    }
    current.push_back(c);
  }
  flush();
}

}  // namespace

std::vector<std::string> split_identifier(std::string_view name) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < name.size()) {
    while (start < name.size() && !is_alnum(name[start])) ++start;
    std::size_t end = start;
    while (end < name.size() && is_alnum(name[end])) ++end;
    if (end > start) split_chunk(name.substr(start, end - start), out);
    start = end;
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) { return split_identifier(text); }

std::set<std::string> word_set(std::string_view identifier) {
  auto words = split_identifier(identifier);
  return {words.begin(), words.end()};
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool starts_with_upper(std::string_view s) { return !s.empty() && is_upper(s.front()); }

std::string to_pascal_case(std::string_view identifier) {
  std::string out;
  for (auto& w : split_identifier(identifier)) {
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
  }
  return out;
}

std::string to_camel_case(std::string_view identifier) {
  std::string out;
  bool first = true;
  for (auto& w : split_identifier(identifier)) {
    if (!first) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
    first = false;
  }
  return out;
}

std::string to_upper_snake(std::string_view identifier) {
  std::string out;
  for (const auto& w : split_identifier(identifier)) {
    if (!out.empty()) out += '_';
    for (char c : w) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_pascal_case(std::string_view identifier) {
  if (identifier.empty() || !is_upper(identifier.front())) return false;
  for (char c : identifier)
    if (!is_alnum(c)) return false;
  // an all-caps name longer than an acronym is a constant, not a type name
  for (char c : identifier)
    if (is_lower(c)) return true;
  return identifier.size() <= 4;
}

bool is_camel_case(std::string_view identifier) {
  if (identifier.empty() || !is_lower(identifier.front())) return false;
  for (char c : identifier)
    if (!is_alnum(c)) return false;
  return true;
}

bool is_upper_snake(std::string_view identifier) {
  if (identifier.empty() || !is_upper(identifier.front())) return false;
  for (char c : identifier)
    if (!(is_upper(c) || is_digit(c) || c == '_')) return false;
  return true;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace specmine
