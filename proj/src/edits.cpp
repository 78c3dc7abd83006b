#include "specmine/edits.h"

#include <algorithm>

#include "specmine/error.h"

namespace specmine {

std::string apply_edits(std::string_view text, std::vector<TextEdit> edits) {
  std::stable_sort(edits.begin(), edits.end(), [](const TextEdit& a, const TextEdit& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.length < b.length;
  });
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  const TextEdit* prev = nullptr;
  for (const auto& e : edits) {
    if (prev && prev->offset == e.offset && prev->length == e.length && prev->replacement == e.replacement) continue;
    if (e.offset < pos) throw TransformConflict("overlapping edits at offset " + std::to_string(e.offset));
    if (e.offset + e.length > text.size()) throw TransformConflict("edit beyond end of text");
    out.append(text.substr(pos, e.offset - pos));
    out += e.replacement;
    pos = e.offset + e.length;
    prev = &e;
  }
  out.append(text.substr(pos));
  return out;
}

TextEdit remove_span(std::string_view text, std::size_t begin, std::size_t end) {
  std::size_t line_start = begin;
  while (line_start > 0 && (text[line_start - 1] == ' ' || text[line_start - 1] == '\t')) --line_start;
  bool alone_before = line_start == 0 || text[line_start - 1] == '\n';
  std::size_t stop = end;
  while (stop < text.size() && (text[stop] == ' ' || text[stop] == '\t')) ++stop;
  bool alone_after = stop >= text.size() || text[stop] == '\n';
  if (alone_before && alone_after) {
    if (stop < text.size()) ++stop;
    return {line_start, stop - line_start, ""};
  }
  return {begin, end - begin, ""};
}

}  // namespace specmine
