#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace specmine {

/// Replacement of `length` bytes at `offset`.
struct TextEdit {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string replacement;
};

/// Applies non-overlapping edits. Identical duplicates are collapsed;
/// overlapping distinct edits raise TransformConflict.
std::string apply_edits(std::string_view text, std::vector<TextEdit> edits);

/// Edit removing [begin, end) plus trailing blanks and one line break, so a
/// deleted declaration leaves no empty line behind when it stood alone.
TextEdit remove_span(std::string_view text, std::size_t begin, std::size_t end);

}  // namespace specmine
