#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace specmine {

/// Splits an identifier into lowercase words at camelCase boundaries,
/// letter/digit transitions and underscores. Acronym runs stay together:
/// "HTTPServer2" -> {"http", "server", "2"}.
std::vector<std::string> split_identifier(std::string_view name);

/// Splits free text (comments, string literals) into words, then splits each
/// word as an identifier.
std::vector<std::string> split_words(std::string_view text);

std::set<std::string> word_set(std::string_view identifier);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_upper(std::string_view s);

std::string to_pascal_case(std::string_view identifier);
std::string to_camel_case(std::string_view identifier);
std::string to_upper_snake(std::string_view identifier);
bool is_pascal_case(std::string_view identifier);
bool is_camel_case(std::string_view identifier);
bool is_upper_snake(std::string_view identifier);

/// 64-bit FNV-1a. Used for content hashes in manifests and test dedup.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Java-style string escaping for rendering annotation values.
std::string quote(std::string_view s);

}  // namespace specmine
