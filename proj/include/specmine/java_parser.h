#pragma once

#include <string>
#include <string_view>

#include "specmine/code_model.h"

namespace specmine::srcmodel {

/// Parses a unit of the supported Java subset. Never throws: syntax outside
/// the subset is skipped and recorded in `diagnostics`.
CompilationModel parse_source(std::string_view text, std::string unit_id = {});

/// Like parse_source, but throws ParseError when no top-level type can be
/// recovered from the unit.
CompilationModel parse_unit(std::string_view text, std::string unit_id = {});

/// Parses a standalone type expression such as "Map<String,List<Integer>>".
TypeRef parse_type_text(std::string_view text);

}  // namespace specmine::srcmodel
