#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specmine/code_model.h"

namespace specmine::corpus {
class CorpusIndex;
}

namespace specmine::srcmodel {

/// Name lookup over a set of parsed units grouped into projects. Resolution
/// order for a simple name: types declared in the same unit, same package,
/// explicit single-type import, wildcard import, unique simple name within
/// the project, otherwise external. Ambiguity yields Unresolved.
class Resolver {
 public:
  Resolver() = default;
  Resolver(const std::vector<const CompilationModel*>& models, const std::vector<std::string>& projects);

  /// `written` may be simple ("Handler") or qualified ("a.b.Handler",
  /// "Outer.Inner"). `type_params` are type variables in scope.
  Resolution resolve(std::size_t unit, const std::string& written,
                     const std::vector<std::string>& type_params = {}) const;

  /// Internal-only lookup of a simple identifier appearing in code bodies;
  /// returns the qualified name when it names a type of the same project.
  std::optional<std::string> resolve_body_identifier(std::size_t unit, const std::string& simple) const;

  /// Unit of `project` declaring the given internal qualified type name.
  std::optional<std::size_t> unit_of(const std::string& project, const std::string& qualified) const;
  bool is_known_simple_name(std::size_t unit, const std::string& simple) const;
  const std::string& project_of(std::size_t unit) const { return projects_[unit]; }
  std::size_t unit_count() const { return models_.size(); }

 private:
  struct ProjectTable {
    std::map<std::string, std::map<std::string, std::string>> by_package;  // package -> simple -> qualified
    std::map<std::string, std::vector<std::string>> by_simple;             // simple -> qualified (incl. nested)
    std::map<std::string, std::size_t> units;                               // qualified -> unit
  };

  Resolution resolve_simple(std::size_t unit, const std::string& simple) const;

  std::vector<const CompilationModel*> models_;
  std::vector<std::string> projects_;
  std::map<std::string, ProjectTable> tables_;
  std::vector<std::map<std::string, std::string>> unit_types_;  // per unit: simple -> qualified
};

struct ResolvedModel {
  std::vector<CompilationModel> models;
  std::vector<std::string> unit_ids;
  std::vector<std::string> unit_projects;
  /// (project, qualified type name) -> declaring unit.
  std::map<std::pair<std::string, std::string>, std::size_t> types;
  /// unit -> units whose declarations it needs.
  std::vector<std::set<std::size_t>> edges;
  std::vector<std::string> diagnostics;

  const TypeDecl* find_type(const std::string& project, const std::string& qualified) const;
};

/// Resolves every TypeRef (recursively through type arguments) and the type
/// names used inside bodies, adding a reference edge for each internal hit.
ResolvedModel resolve_references(std::vector<CompilationModel> models, const std::vector<std::string>& unit_ids,
                                 const std::vector<std::string>& unit_projects);

/// Convenience overload over a whole corpus index.
ResolvedModel resolve_references(const corpus::CorpusIndex& index);

/// Qualified names referenced from a unit's declarations and bodies that
/// resolve internally (used for edges and closure checks).
std::set<std::string> internal_references(const CompilationModel& model, std::size_t unit, const Resolver& resolver);

}  // namespace specmine::srcmodel
