#include "specmine/resolve.h"

#include <algorithm>

#include "specmine/corpus.h"
#include "specmine/java_lexer.h"

namespace specmine::srcmodel {

Resolver::Resolver(const std::vector<const CompilationModel*>& models, const std::vector<std::string>& projects)
    : models_(models), projects_(projects), unit_types_(models.size()) {
  for (std::size_t u = 0; u < models_.size(); ++u) {
    const CompilationModel& m = *models_[u];
    ProjectTable& table = tables_[projects_[u]];
    for (const auto& top : m.types) table.by_package[m.package_name].emplace(top.name, top.qualified_name);
    for_each_type(m.types, [&](const TypeDecl& t) {
      auto& list = table.by_simple[t.name];
      if (std::find(list.begin(), list.end(), t.qualified_name) == list.end()) list.push_back(t.qualified_name);
      table.units.emplace(t.qualified_name, u);
      unit_types_[u].emplace(t.name, t.qualified_name);
    });
  }
}

Resolution Resolver::resolve_simple(std::size_t unit, const std::string& simple) const {
  const CompilationModel& m = *models_[unit];
  const ProjectTable& table = tables_.at(projects_[unit]);

  if (auto it = unit_types_[unit].find(simple); it != unit_types_[unit].end())
    return {ResolutionKind::Internal, it->second};

  if (auto pkg = table.by_package.find(m.package_name); pkg != table.by_package.end()) {
    if (auto it = pkg->second.find(simple); it != pkg->second.end()) return {ResolutionKind::Internal, it->second};
  }

  for (const auto& imp : m.imports) {
    if (imp.is_static || imp.is_wildcard || imp.simple_name() != simple) continue;
    if (table.units.count(imp.name)) return {ResolutionKind::Internal, imp.name};
    return {ResolutionKind::External, imp.name};
  }

  std::vector<std::string> wildcard_hits;
  for (const auto& imp : m.imports) {
    if (imp.is_static || !imp.is_wildcard) continue;
    std::string candidate = imp.name + "." + simple;
    if (table.units.count(candidate)) wildcard_hits.push_back(candidate);
  }
  if (wildcard_hits.size() == 1) return {ResolutionKind::Internal, wildcard_hits.front()};
  if (wildcard_hits.size() > 1) return {ResolutionKind::Unresolved, simple};

  if (auto it = table.by_simple.find(simple); it != table.by_simple.end()) {
    if (it->second.size() == 1) return {ResolutionKind::Internal, it->second.front()};
    return {ResolutionKind::Unresolved, simple};
  }
  return {ResolutionKind::External, simple};
}

Resolution Resolver::resolve(std::size_t unit, const std::string& written,
                             const std::vector<std::string>& type_params) const {
  if (written.empty() || written == "?") return {ResolutionKind::Unresolved, written};
  if (is_primitive_type(written)) return {ResolutionKind::Primitive, written};
  if (std::find(type_params.begin(), type_params.end(), written) != type_params.end())
    return {ResolutionKind::External, written};

  auto dot = written.find('.');
  if (dot == std::string::npos) return resolve_simple(unit, written);

  const ProjectTable& table = tables_.at(projects_[unit]);
  if (table.units.count(written)) return {ResolutionKind::Internal, written};
  Resolution head = resolve_simple(unit, written.substr(0, dot));
  if (head.kind == ResolutionKind::Internal) {
    std::string candidate = head.target + written.substr(dot);
    if (table.units.count(candidate)) return {ResolutionKind::Internal, candidate};
  }
  return {ResolutionKind::External, written};
}

std::optional<std::string> Resolver::resolve_body_identifier(std::size_t unit, const std::string& simple) const {
  if (!is_known_simple_name(unit, simple)) return std::nullopt;
  Resolution r = resolve_simple(unit, simple);
  if (r.kind == ResolutionKind::Internal) return r.target;
  return std::nullopt;
}

std::optional<std::size_t> Resolver::unit_of(const std::string& project, const std::string& qualified) const {
  auto table = tables_.find(project);
  if (table == tables_.end()) return std::nullopt;
  if (auto it = table->second.units.find(qualified); it != table->second.units.end()) return it->second;
  return std::nullopt;
}

bool Resolver::is_known_simple_name(std::size_t unit, const std::string& simple) const {
  const ProjectTable& table = tables_.at(projects_[unit]);
  return table.by_simple.count(simple) != 0;
}

const TypeDecl* ResolvedModel::find_type(const std::string& project, const std::string& qualified) const {
  auto it = types.find({project, qualified});
  if (it == types.end()) return nullptr;
  const TypeDecl* found = nullptr;
  for_each_type(models[it->second].types, [&](const TypeDecl& t) {
    if (!found && t.qualified_name == qualified) found = &t;
  });
  return found;
}

namespace {

void collect_body_refs(const std::vector<Token>& tokens, std::size_t unit, const Resolver& resolver,
                       std::set<std::string>& out) {
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const Token& t = tokens[k];
    if (t.kind != TokenKind::Identifier) continue;
    if (k > 0 && tokens[k - 1].is(".")) continue;
    if (auto q = resolver.resolve_body_identifier(unit, t.text)) out.insert(*q);
  }
}

void collect_ref(const TypeRef& ref, std::size_t unit, const Resolver& resolver,
                 const std::vector<std::string>& type_params, std::set<std::string>& out) {
  if (!ref.base.empty() && ref.base != "?") {
    Resolution r = resolver.resolve(unit, ref.base, type_params);
    if (r.kind == ResolutionKind::Internal) out.insert(r.target);
  }
  for (const auto& a : ref.args) collect_ref(a, unit, resolver, type_params, out);
}

void collect_type(const TypeDecl& type, std::size_t unit, const Resolver& resolver,
                  std::vector<std::string> type_params, std::set<std::string>& out) {
  type_params.insert(type_params.end(), type.type_params.begin(), type.type_params.end());
  for (const auto* s : type.super_types()) collect_ref(*s, unit, resolver, type_params, out);
  for (const auto& a : type.annotations) {
    Resolution r = resolver.resolve(unit, a.name, type_params);
    if (r.kind == ResolutionKind::Internal) out.insert(r.target);
  }
  for (const auto& m : type.members) {
    if (!m.type.raw.empty()) collect_ref(m.type, unit, resolver, type_params, out);
    for (const auto& p : m.params) collect_ref(p.type, unit, resolver, type_params, out);
    for (const auto& t : m.throws) collect_ref(t, unit, resolver, type_params, out);
    for (const auto& a : m.annotations) {
      Resolution r = resolver.resolve(unit, a.name, type_params);
      if (r.kind == ResolutionKind::Internal) out.insert(r.target);
    }
    collect_body_refs(m.body, unit, resolver, out);
  }
  collect_body_refs(type.init_tokens, unit, resolver, out);
  for (const auto& n : type.nested) collect_type(n, unit, resolver, type_params, out);
}

void fill_ref(TypeRef& ref, std::size_t unit, const Resolver& resolver, const std::vector<std::string>& type_params,
              const std::string& unit_id, std::vector<std::string>& diagnostics) {
  if (ref.base.empty()) return;
  if (ref.base == "?") {
    ref.resolution = {ResolutionKind::External, "?"};
  } else {
    ref.resolution = resolver.resolve(unit, ref.base, type_params);
    if (ref.resolution.kind == ResolutionKind::Unresolved)
      diagnostics.push_back(unit_id + ": ambiguous type name '" + ref.base + "' left unresolved");
  }
  for (auto& a : ref.args) fill_ref(a, unit, resolver, type_params, unit_id, diagnostics);
}

void fill_type(TypeDecl& type, std::size_t unit, const Resolver& resolver, std::vector<std::string> type_params,
               const std::string& unit_id, std::vector<std::string>& diagnostics) {
  type_params.insert(type_params.end(), type.type_params.begin(), type.type_params.end());
  for (auto& r : type.extends) fill_ref(r, unit, resolver, type_params, unit_id, diagnostics);
  for (auto& r : type.implements) fill_ref(r, unit, resolver, type_params, unit_id, diagnostics);
  for (auto& m : type.members) {
    if (!m.type.raw.empty()) fill_ref(m.type, unit, resolver, type_params, unit_id, diagnostics);
    for (auto& p : m.params) fill_ref(p.type, unit, resolver, type_params, unit_id, diagnostics);
    for (auto& t : m.throws) fill_ref(t, unit, resolver, type_params, unit_id, diagnostics);
  }
  for (auto& n : type.nested) fill_type(n, unit, resolver, type_params, unit_id, diagnostics);
}

}  // namespace

std::set<std::string> internal_references(const CompilationModel& model, std::size_t unit, const Resolver& resolver) {
  std::set<std::string> out;
  for (const auto& a : model.package_annotations) {
    Resolution r = resolver.resolve(unit, a.name);
    if (r.kind == ResolutionKind::Internal) out.insert(r.target);
  }
  for (const auto& t : model.types) collect_type(t, unit, resolver, {}, out);
  return out;
}

ResolvedModel resolve_references(std::vector<CompilationModel> models, const std::vector<std::string>& unit_ids,
                                 const std::vector<std::string>& unit_projects) {
  ResolvedModel result;
  std::vector<const CompilationModel*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  Resolver resolver(ptrs, unit_projects);

  result.edges.resize(models.size());
  for (std::size_t u = 0; u < models.size(); ++u) {
    for (const auto& target : internal_references(models[u], u, resolver)) {
      auto unit = resolver.unit_of(unit_projects[u], target);
      if (unit && *unit != u) result.edges[u].insert(*unit);
    }
  }
  for (std::size_t u = 0; u < models.size(); ++u) {
    for (auto& t : models[u].types) fill_type(t, u, resolver, {}, unit_ids[u], result.diagnostics);
    for_each_type(models[u].types, [&](const TypeDecl& t) { result.types.emplace(std::make_pair(unit_projects[u], t.qualified_name), u); });
  }
  result.models = std::move(models);
  result.unit_ids = unit_ids;
  result.unit_projects = unit_projects;
  return result;
}

ResolvedModel resolve_references(const corpus::CorpusIndex& index) {
  std::vector<std::string> ids;
  std::vector<std::string> projects;
  for (const auto& u : index.units()) {
    ids.push_back(u.unit_id);
    projects.push_back(u.project_id);
  }
  return resolve_references(index.models(), ids, projects);
}

}  // namespace specmine::srcmodel
