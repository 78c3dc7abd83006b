#include "specmine/extract.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specmine/edits.h"
#include "specmine/error.h"
#include "specmine/java_lexer.h"
#include "specmine/java_parser.h"
#include "specmine/text.h"

namespace specmine::extract {

using srcmodel::CompilationModel;
using srcmodel::Program;
using srcmodel::SourceFile;
using srcmodel::TypeDecl;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string file_stem(const std::string& path) {
  auto slash = path.rfind('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

std::string package_dir(const std::string& package) {
  std::string dir = package;
  std::replace(dir.begin(), dir.end(), '.', '/');
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_types(const std::vector<TypeDecl>& types) {
  std::size_t n = 0;
  srcmodel::for_each_type(types, [&](const TypeDecl&) { ++n; });
  return n;
}

bool is_platform_package(const std::string& name) {
  return name.rfind("java.", 0) == 0 || name.rfind("javax.", 0) == 0;
}

}  // namespace

std::string LibraryCoord::coordinate() const { return group + ":" + artifact + ":" + version; }

LibraryMapping::LibraryMapping(std::vector<LibraryCoord> entries) : entries_(std::move(entries)) {}

LibraryMapping LibraryMapping::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw MappingFileUnreadable("cannot open library mapping " + file.string());
  std::vector<LibraryCoord> entries;
  try {
    Json doc = Json::parse(in);
    for (const auto& rec : doc) {
      LibraryCoord c;
      c.prefix = rec.at("prefix").get<std::string>();
      c.group = rec.at("group").get<std::string>();
      c.artifact = rec.at("artifact").get<std::string>();
      c.version = rec.at("version").get<std::string>();
      if (c.prefix.empty() || c.group.empty() || c.artifact.empty())
        throw MappingFileUnreadable("incomplete record in " + file.string());
      entries.push_back(std::move(c));
    }
  } catch (const Json::exception& e) {
    throw MappingFileUnreadable("malformed library mapping " + file.string() + ": " + e.what());
  }
  return LibraryMapping(std::move(entries));
}

std::optional<LibraryCoord> LibraryMapping::lookup(const std::string& qualified) const {
  const LibraryCoord* best = nullptr;
  for (const auto& e : entries_) {
    bool hit = qualified == e.prefix || qualified.rfind(e.prefix + ".", 0) == 0;
    if (hit && (!best || e.prefix.size() > best->prefix.size())) best = &e;
  }
  if (!best) return std::nullopt;
  return *best;
}

std::vector<SourceFile> Subsystem::files() const {
  std::vector<SourceFile> out;
  for (const auto& u : units) out.push_back({u.path, u.text});
  return out;
}

std::set<std::string> Subsystem::origin_set() const {
  std::set<std::string> out;
  for (const auto& u : units) out.insert(u.origin);
  return out;
}

Subsystem expand_to_subsystem(std::size_t seed_unit, const srcmodel::ResolvedModel& model,
                              const corpus::CorpusIndex& index, const Limits& limits) {
  const std::string& pkg = model.models[seed_unit].package_name;
  std::set<std::size_t> members{seed_unit};
  auto check_cap = [&] {
    if (members.size() > limits.hard_cap)
      throw TooLarge("closure of " + model.unit_ids[seed_unit] + " exceeds " + std::to_string(limits.hard_cap) +
                     " units");
  };
  std::deque<std::size_t> work{seed_unit};
  std::vector<std::size_t> deferred;
  while (!work.empty()) {
    std::size_t u = work.front();
    work.pop_front();
    for (std::size_t v : model.edges[u]) {
      if (members.count(v)) continue;
      if (model.models[v].package_name != pkg) {
        deferred.push_back(v);
        continue;
      }
      members.insert(v);
      check_cap();
      work.push_back(v);
    }
  }
  for (std::size_t v : deferred) {
    if (members.insert(v).second) {
      check_cap();
      work.push_back(v);
    }
  }
  while (!work.empty()) {
    std::size_t u = work.front();
    work.pop_front();
    for (std::size_t v : model.edges[u]) {
      if (members.insert(v).second) {
        check_cap();
        work.push_back(v);
      }
    }
  }

  Subsystem s;
  const auto& seed = index.units()[seed_unit];
  s.project_id = seed.project_id;
  s.seed_unit = seed.unit_id;
  s.package_name = pkg;
  std::string primary =
      model.models[seed_unit].types.empty() ? file_stem(seed.relative_path) : model.models[seed_unit].types[0].name;
  s.id = s.project_id + "." + primary;
  std::set<std::string> packages;
  std::vector<std::size_t> ordered(members.begin(), members.end());
  std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
    return index.units()[a].relative_path < index.units()[b].relative_path;
  });
  for (std::size_t u : ordered) {
    const auto& unit = index.units()[u];
    s.units.push_back({unit.relative_path, unit.unit_id, unit.text, unit.loc});
    s.total_loc += unit.loc;
    s.type_count += count_types(model.models[u].types);
    packages.insert(model.models[u].package_name);
  }
  s.original_packages.assign(packages.begin(), packages.end());
  return s;
}

Subsystem flatten_packages(const Subsystem& subsystem, const std::string& target_package) {
  Program program(subsystem.files());
  std::set<std::string> original_packages(subsystem.original_packages.begin(), subsystem.original_packages.end());

  // top-level names, first come first served in unit order
  std::map<std::string, std::string> renamed;
  std::set<std::string> taken;
  std::vector<std::string> tops;
  for (std::size_t u = 0; u < program.size(); ++u)
    for (const auto& t : program.model(u).types) tops.push_back(t.qualified_name);
  for (std::size_t u = 0; u < program.size(); ++u)
    for (const auto& t : program.model(u).types) taken.insert(t.name);
  std::set<std::string> assigned;
  for (const auto& q : tops) {
    const TypeDecl* t = program.find_type(q);
    std::string name = t->name;
    if (assigned.count(name)) {
      for (int n = 2;; ++n) {
        std::string candidate = t->name + std::to_string(n);
        if (!assigned.count(candidate) && !taken.count(candidate)) {
          name = candidate;
          break;
        }
      }
    }
    assigned.insert(name);
    renamed[q] = name;
  }

  // qualified internal name -> same name re-rooted in the target package
  auto retarget = [&](const std::string& q) -> std::optional<std::string> {
    for (const auto& [top, name] : renamed) {
      if (q == top) return name;
      if (q.rfind(top + ".", 0) == 0) return name + q.substr(top.size());
    }
    return std::nullopt;
  };
  auto in_target = [&](const std::string& rest) { return target_package.empty() ? rest : target_package + "." + rest; };

  Subsystem out = subsystem;
  out.package_name = target_package;
  out.renamed = renamed;
  out.units.clear();
  out.total_loc = 0;
  std::set<std::string> used_paths;

  for (std::size_t u = 0; u < program.size(); ++u) {
    const CompilationModel& m = program.model(u);
    const std::string& text = program.text(u);
    const auto& toks = m.tokens;
    std::vector<TextEdit> edits;
    std::vector<std::pair<std::size_t, std::size_t>> skipped;  // token ranges handled as a whole

    if (!m.package_tokens.empty()) {
      std::size_t begin = toks[m.package_tokens.first].offset;
      std::size_t end = toks[m.package_tokens.last - 1].end();
      if (target_package.empty()) {
        std::size_t kw = m.package_tokens.first - 1;
        edits.push_back(remove_span(text, toks[kw].offset, toks[m.package_tokens.last].end()));
      } else {
        edits.push_back({begin, end - begin, target_package});
      }
      skipped.emplace_back(m.package_tokens.first, m.package_tokens.last);
    } else if (!target_package.empty()) {
      edits.push_back({0, 0, "package " + target_package + ";\n\n"});
    }

    for (const auto& imp : m.imports) {
      std::size_t begin = toks[imp.tokens.first].offset;
      std::size_t end = toks[imp.tokens.last - 1].end();
      skipped.emplace_back(imp.tokens.first, imp.tokens.last);
      if (imp.is_static) {
        std::string owner = imp.is_wildcard ? imp.name : imp.package();
        std::string member = imp.is_wildcard ? "*" : imp.simple_name();
        if (auto r = retarget(owner))
          edits.push_back({begin, end - begin, "import static " + in_target(*r) + "." + member + ";"});
        continue;
      }
      if (imp.is_wildcard) {
        if (original_packages.count(imp.name)) {
          edits.push_back(remove_span(text, begin, end));
        } else if (auto r = retarget(imp.name)) {
          edits.push_back({begin, end - begin, "import " + in_target(*r) + ".*;"});
        }
        continue;
      }
      if (auto r = retarget(imp.name)) {
        if (renamed.count(imp.name)) {
          edits.push_back(remove_span(text, begin, end));
        } else {
          edits.push_back({begin, end - begin, "import " + in_target(*r) + ";"});
        }
      }
    }

    for (const auto& occ : program.type_occurrences(u)) {
      bool skip = false;
      for (auto [a, b] : skipped)
        if (occ.first >= a && occ.first < b) skip = true;
      if (skip) continue;
      auto top = renamed.find(occ.qualified);
      if (top == renamed.end()) continue;
      const TypeDecl* t = program.find_type(occ.qualified);
      if (occ.last == occ.first && t->name == top->second) continue;
      std::size_t begin = toks[occ.first].offset;
      std::size_t end = toks[occ.last].end();
      edits.push_back({begin, end - begin, top->second});
    }

    SubsystemUnit unit;
    unit.origin = subsystem.units[u].origin;
    unit.text = apply_edits(text, edits);
    unit.loc = srcmodel::count_code_lines(srcmodel::lex(unit.text).tokens);
    std::string stem = file_stem(program.path(u));
    for (const auto& t : m.types)
      if (t.name == stem) stem = renamed[t.qualified_name];
    std::string dir = package_dir(target_package);
    std::string path = (dir.empty() ? "" : dir + "/") + stem + ".java";
    for (int n = 2; used_paths.count(path); ++n) path = (dir.empty() ? "" : dir + "/") + stem + "_" + std::to_string(n) + ".java";
    used_paths.insert(path);
    unit.path = path;
    out.total_loc += unit.loc;
    out.units.push_back(std::move(unit));
  }
  std::sort(out.units.begin(), out.units.end(),
            [](const SubsystemUnit& a, const SubsystemUnit& b) { return a.path < b.path; });
  return out;
}

std::vector<std::string> unresolved_internal_references(const Subsystem& flattened,
                                                        const std::set<std::string>& project_type_names) {
  Program program(flattened.files());
  std::vector<std::string> problems;
  std::set<std::string> packages(flattened.original_packages.begin(), flattened.original_packages.end());
  packages.erase(flattened.package_name);
  std::set<std::string> declared;
  for (const auto& q : program.type_names()) declared.insert(program.find_type(q)->name);

  for (std::size_t u = 0; u < program.size(); ++u) {
    const CompilationModel& m = program.model(u);
    const std::string& where = program.path(u);
    for (const auto& imp : m.imports) {
      for (const auto& p : packages)
        if (imp.name == p || imp.name.rfind(p + ".", 0) == 0)
          problems.push_back(where + ": import of original package '" + imp.name + "'");
    }
    std::vector<TypeDecl> types = m.types;
    std::function<void(const srcmodel::TypeRef&)> check = [&](const srcmodel::TypeRef& ref) {
      if (!ref.base.empty() && ref.base != "?") {
        auto r = program.resolver().resolve(u, ref.base);
        std::string simple = ref.base.substr(ref.base.rfind('.') == std::string::npos ? 0 : ref.base.rfind('.') + 1);
        if (r.kind == srcmodel::ResolutionKind::Unresolved)
          problems.push_back(where + ": unresolved type '" + ref.base + "'");
        else if (r.kind == srcmodel::ResolutionKind::External && project_type_names.count(simple) &&
                 !declared.count(simple))
          problems.push_back(where + ": dangling project type '" + ref.base + "'");
      }
      for (const auto& a : ref.args) check(a);
    };
    for (auto& t : types) srcmodel::for_each_type_ref(t, check);

    const auto& toks = m.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!toks[i].is_identifier() || (i > 0 && toks[i - 1].is("."))) continue;
      if (!m.package_tokens.empty() && i >= m.package_tokens.first && i < m.package_tokens.last) continue;
      std::string chain = toks[i].text;
      for (std::size_t k = i; k + 2 < toks.size() && toks[k + 1].is(".") && toks[k + 2].is_identifier(); k += 2) {
        if (packages.count(chain)) {
          bool in_import = false;
          for (const auto& imp : m.imports)
            if (i >= imp.tokens.first && i < imp.tokens.last) in_import = true;
          if (!in_import) problems.push_back(where + ": qualified reference into original package '" + chain + "'");
          break;
        }
        chain += "." + toks[k + 2].text;
      }
      const std::string& name = toks[i].text;
      if (project_type_names.count(name) && !declared.count(name))
        problems.push_back(where + ": dangling project type '" + name + "' in code");
    }
  }
  return problems;
}

double score_relevancy(const Subsystem& subsystem, const std::vector<std::string>& key_terms) {
  std::set<std::string> terms;
  for (const auto& k : key_terms) {
    std::string w = to_lower(k);
    if (!w.empty() && w[0] == '@') w = w.substr(1);
    if (!w.empty() && w != "...") terms.insert(w);
  }
  double score = 0.0;
  for (const auto& unit : subsystem.units) {
    CompilationModel m = srcmodel::parse_source(unit.text, unit.path);
    std::set<std::size_t> decl_names;
    std::set<std::size_t> ctor_names;
    srcmodel::for_each_type(m.types, [&](const TypeDecl& t) {
      decl_names.insert(t.name_token);
      for (const auto& mem : t.members) {
        if (mem.kind == srcmodel::MemberKind::Constructor) ctor_names.insert(mem.name_token);
        else decl_names.insert(mem.name_token);
      }
    });
    for (std::size_t i = 0; i < m.tokens.size(); ++i) {
      const auto& tok = m.tokens[i];
      if (!m.package_tokens.empty() && i >= m.package_tokens.first && i < m.package_tokens.last) continue;
      if (ctor_names.count(i)) continue;
      std::vector<std::string> words;
      if (tok.is_identifier()) words = split_identifier(tok.text);
      else if (tok.kind == srcmodel::TokenKind::StringLiteral) words = split_words(tok.text);
      double weight = decl_names.count(i) ? 2.0 : 1.0;
      for (const auto& w : words)
        if (terms.count(w)) score += weight;
    }
    for (const auto& c : m.comments)
      for (const auto& w : split_words(c.text))
        if (terms.count(w)) score += 1.0;
  }
  return score;
}

bool is_test_unit(const CompilationModel& model) {
  for (const auto& imp : model.imports)
    if (imp.name.rfind("org.junit", 0) == 0) return true;
  bool found = false;
  srcmodel::for_each_type(model.types, [&](const TypeDecl& t) {
    for (const auto& m : t.members)
      if (m.kind == srcmodel::MemberKind::Method && m.has_annotation("Test")) found = true;
  });
  return found;
}

FilterResult filter_subsystems(std::vector<Subsystem> subsystems, const FilterConfig& config) {
  FilterResult result;
  std::set<std::set<std::string>> seen;
  for (auto& s : subsystems) {
    std::size_t tests = 0;
    for (const auto& u : s.units)
      if (is_test_unit(srcmodel::parse_source(u.text))) ++tests;
    double test_fraction = s.units.empty() ? 0.0 : static_cast<double>(tests) / static_cast<double>(s.units.size());
    std::string reason;
    if (s.total_loc < config.min_loc || s.type_count < config.min_types) reason = "trivial";
    else if (s.total_loc > config.max_loc || s.units.size() > config.max_units) reason = "complex";
    else if (test_fraction > config.max_test_fraction) reason = "tests";
    else if (s.relevancy < config.min_relevancy) reason = "relevancy";
    else if (!seen.insert(s.origin_set()).second) reason = "duplicate";
    if (reason.empty()) result.kept.push_back(std::move(s));
    else result.rejected.push_back({s.id, reason});
  }
  return result;
}

LibraryResult identify_libraries(const Subsystem& subsystem, const LibraryMapping& mapping) {
  LibraryResult result;
  std::set<std::string> reported;
  std::map<std::string, LibraryCoord> found;
  for (const auto& unit : subsystem.units) {
    CompilationModel m = srcmodel::parse_source(unit.text, unit.path);
    for (const auto& imp : m.imports) {
      std::string name = imp.name;
      if (!subsystem.package_name.empty() && name.rfind(subsystem.package_name + ".", 0) == 0) continue;
      if (is_platform_package(name)) continue;
      if (auto c = mapping.lookup(name)) {
        found.emplace(c->coordinate(), *c);
      } else {
        std::string pkg = imp.is_wildcard ? name : imp.package();
        if (reported.insert(pkg).second) result.diagnostics.push_back("no library mapping for package '" + pkg + "'");
      }
    }
  }
  for (auto& [key, c] : found) result.libraries.push_back(c);
  return result;
}

ExtractResult extract_subsystems(const corpus::CorpusIndex& index, const srcmodel::ResolvedModel& model,
                                 const std::vector<std::string>& seed_units, const ExtractOptions& options,
                                 const LibraryMapping& mapping) {
  ExtractResult result;
  std::map<std::string, std::set<std::string>> project_types;
  for (std::size_t u = 0; u < model.models.size(); ++u)
    srcmodel::for_each_type(model.models[u].types,
                            [&](const TypeDecl& t) { project_types[model.unit_projects[u]].insert(t.name); });

  std::vector<Subsystem> candidates;
  std::set<std::string> ids;
  for (const auto& seed_id : seed_units) {
    std::size_t seed = index.unit_index(seed_id);
    if (is_test_unit(model.models[seed])) continue;
    Subsystem s;
    try {
      s = expand_to_subsystem(seed, model, index, options.limits);
    } catch (const TooLarge& e) {
      result.rejected.push_back({seed_id, "too-large"});
      result.diagnostics.push_back(e.what());
      continue;
    }
    std::string id = s.id;
    for (int n = 2; ids.count(id); ++n) id = s.id + "-" + std::to_string(n);
    ids.insert(id);
    s = flatten_packages(s, s.package_name);
    s.id = id;
    for (auto& p : unresolved_internal_references(s, project_types[s.project_id])) s.diagnostics.push_back(p);
    s.relevancy = score_relevancy(s, options.key_terms);
    auto libs = identify_libraries(s, mapping);
    s.libraries = libs.libraries;
    for (auto& d : libs.diagnostics) s.diagnostics.push_back(d);
    candidates.push_back(std::move(s));
  }
  result.candidates = candidates.size();
  auto filtered = filter_subsystems(std::move(candidates), options.filter);
  result.kept = std::move(filtered.kept);
  for (auto& r : filtered.rejected) result.rejected.push_back(std::move(r));
  return result;
}

void save_subsystem(const Subsystem& s, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir / "src");
  Json manifest;
  manifest["version"] = 1;
  manifest["id"] = s.id;
  manifest["project"] = s.project_id;
  manifest["seed"] = s.seed_unit;
  manifest["package"] = s.package_name;
  manifest["total_loc"] = s.total_loc;
  manifest["type_count"] = s.type_count;
  manifest["relevancy"] = s.relevancy;
  manifest["libraries"] = Json::array();
  for (const auto& l : s.libraries)
    manifest["libraries"].push_back(
        {{"prefix", l.prefix}, {"group", l.group}, {"artifact", l.artifact}, {"version", l.version}});
  manifest["original_packages"] = s.original_packages;
  manifest["renamed"] = Json::object();
  for (const auto& [k, v] : s.renamed) manifest["renamed"][k] = v;
  manifest["diagnostics"] = s.diagnostics;
  manifest["units"] = Json::array();
  for (const auto& u : s.units) {
    fs::path file = dir / "src" / u.path;
    fs::create_directories(file.parent_path());
    std::ofstream(file, std::ios::binary) << u.text;
    manifest["units"].push_back({{"path", u.path}, {"origin", u.origin}, {"loc", u.loc}, {"hash", hex64(fnv1a(u.text))}});
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

Subsystem load_subsystem(const fs::path& dir) {
  Json manifest;
  try {
    manifest = Json::parse(read_file(dir / "manifest.json"));
  } catch (const Json::exception& e) {
    throw IoError("malformed subsystem manifest in " + dir.string() + ": " + e.what());
  }
  Subsystem s;
  s.id = manifest.at("id");
  s.project_id = manifest.at("project");
  s.seed_unit = manifest.at("seed");
  s.package_name = manifest.at("package");
  s.total_loc = manifest.at("total_loc");
  s.type_count = manifest.at("type_count");
  s.relevancy = manifest.at("relevancy");
  for (const auto& l : manifest.at("libraries"))
    s.libraries.push_back({l.at("group"), l.at("artifact"), l.at("version"), l.at("prefix")});
  s.original_packages = manifest.at("original_packages").get<std::vector<std::string>>();
  for (const auto& [k, v] : manifest.at("renamed").items()) s.renamed[k] = v.get<std::string>();
  s.diagnostics = manifest.at("diagnostics").get<std::vector<std::string>>();
  for (const auto& u : manifest.at("units")) {
    SubsystemUnit unit;
    unit.path = u.at("path");
    unit.origin = u.at("origin");
    unit.loc = u.at("loc");
    unit.text = read_file(dir / "src" / unit.path);
    s.units.push_back(std::move(unit));
  }
  return s;
}

}  // namespace specmine::extract
