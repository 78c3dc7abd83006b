#include "specmine/testgen.h"

#include <algorithm>
#include <deque>
#include <sstream>

#include "json.hpp"
#include "specmine/error.h"
#include "specmine/java_lexer.h"
#include "specmine/program.h"
#include "specmine/text.h"

namespace specmine::testgen {

using srcmodel::CompilationModel;
using srcmodel::MemberDecl;
using srcmodel::Program;
using srcmodel::Token;
using srcmodel::TokenKind;
using srcmodel::TokenRange;
using srcmodel::TypeDecl;

namespace {

const std::set<std::string> kLifecycle = {"Before",    "BeforeEach", "After",      "AfterEach",
                                          "BeforeAll", "AfterAll",   "BeforeClass", "AfterClass"};

bool has_test_method(const CompilationModel& m) {
  bool found = false;
  srcmodel::for_each_type(m.types, [&](const TypeDecl& t) {
    for (const auto& member : t.members)
      if (member.kind == MemberKind::Method && member.has_annotation("Test")) found = true;
  });
  return found;
}

// Does the import name a type or member of package `pkg`?
bool imports_from(const srcmodel::ImportDecl& imp, const std::string& pkg) {
  if (imp.name == pkg) return imp.is_wildcard;
  if (imp.name.rfind(pkg + ".", 0) != 0) return false;
  std::string rest = imp.name.substr(pkg.size() + 1);
  return !rest.empty() && starts_with_upper(rest);
}

std::string literal_kind(const Token& t) {
  switch (t.kind) {
    case TokenKind::StringLiteral: return "string";
    case TokenKind::CharLiteral: return "char";
    case TokenKind::IntLiteral:
    case TokenKind::FloatLiteral: return "number";
    default: break;
  }
  if (t.is("true") || t.is("false")) return "boolean";
  if (t.is("null")) return "null";
  return "";
}

// Source text of a token range, later lines shifted left by the first
// token's column.
std::string range_text(const std::string& text, const std::vector<Token>& toks, TokenRange r) {
  if (r.empty()) return "";
  std::size_t begin = toks[r.first].offset;
  std::size_t end = toks[r.last - 1].end();
  std::size_t indent = toks[r.first].column - 1;
  std::string raw = text.substr(begin, end - begin);
  std::string out;
  std::istringstream in(raw);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) {
      out += '\n';
      std::size_t n = 0;
      while (n < indent && n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
      line = line.substr(n);
    }
    out += line;
    first = false;
  }
  return out;
}

struct Candidate {
  std::string name;
  TokenRange range;
  bool lifecycle = false;
};

std::size_t skip_type_args(const std::vector<Token>& toks, std::size_t j) {
  if (j >= toks.size() || !toks[j].is("<")) return j;
  int depth = 0;
  for (; j < toks.size(); ++j) {
    if (toks[j].is("<")) ++depth;
    else if (toks[j].is(">")) --depth;
    else if (toks[j].is(">>")) depth -= 2;
    if (depth <= 0) return j + 1;
  }
  return j;
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool is_primitive(const std::string& raw) {
  static const std::set<std::string> prims = {"int", "long", "short", "byte", "char", "float", "double", "boolean"};
  return prims.count(raw) > 0;
}

bool literal_fits(const std::string& kind, const std::string& raw, const std::set<std::string>& internal) {
  if (kind.empty()) return true;
  using abstraction::TypeGroup;
  auto t = abstraction::classify(raw, internal);
  bool object = t.group == TypeGroup::External && (t.name == "Object" || t.name == "Serializable");
  if (kind == "null") return !is_primitive(raw);
  if (object) return true;
  if (kind == "string") return t.group == TypeGroup::Text;
  if (kind == "char") return t.group == TypeGroup::Char || t.group == TypeGroup::Integral || t.group == TypeGroup::Floating;
  if (kind == "number") return t.group == TypeGroup::Integral || t.group == TypeGroup::Floating;
  if (kind == "boolean") return t.group == TypeGroup::Boolean;
  return true;
}

}  // namespace

std::string MemberRef::describe() const {
  std::string s = type + "." + name;
  if (kind != MemberKind::Field) s += "/" + std::to_string(arity);
  return s;
}

std::vector<corpus::SourceUnit> find_test_units(const corpus::CorpusIndex& index,
                                                const extract::Subsystem& retrieved) {
  std::set<std::string> pkgs(retrieved.original_packages.begin(), retrieved.original_packages.end());
  std::set<std::string> origins = retrieved.origin_set();
  std::vector<corpus::SourceUnit> out;
  for (std::size_t i = 0; i < index.units().size(); ++i) {
    const auto& unit = index.units()[i];
    if (unit.project_id != retrieved.project_id || origins.count(unit.unit_id)) continue;
    const auto& m = index.models()[i];
    if (!has_test_method(m)) continue;
    bool related = pkgs.count(m.package_name) > 0;
    for (const auto& imp : m.imports)
      for (const auto& p : pkgs)
        if (imports_from(imp, p)) related = true;
    if (related) out.push_back(unit);
  }
  return out;
}

std::string normalized_hash(const std::vector<std::vector<Token>>& parts, const std::set<std::string>& renamed) {
  std::map<std::string, std::string> alpha;
  std::string stream;
  for (const auto& part : parts) {
    for (const auto& t : part) {
      std::string text = t.text;
      if (t.kind == TokenKind::Identifier && renamed.count(text)) {
        auto it = alpha.find(text);
        if (it == alpha.end()) it = alpha.emplace(text, "v" + std::to_string(alpha.size() + 1)).first;
        text = it->second;
      }
      stream += std::to_string(static_cast<int>(t.kind));
      stream += text;
      stream += '\x1f';
    }
    stream += '\x1e';
  }
  return hex64(fnv1a(stream));
}

namespace {

void harvest_unit(const Program& program, std::size_t u, const extract::Subsystem& out_sub,
                  const corpus::SourceUnit& origin, const std::set<std::string>& project_types,
                  std::vector<TestMethod>& tests) {
  const CompilationModel& m = program.model(u);
  const auto& toks = m.tokens;
  const std::string& text = program.text(u);
  const std::string& target = out_sub.package_name;

  std::set<std::string> local_qualified;
  std::set<std::string> local_names;
  srcmodel::for_each_type(m.types, [&](const TypeDecl& t) {
    local_qualified.insert(t.qualified_name);
    local_names.insert(t.name);
  });

  std::vector<std::string> imports;
  for (const auto& imp : m.imports) {
    if (!target.empty() && imp.name.rfind(target + ".", 0) == 0) continue;
    std::string owner = imp.is_static && !imp.is_wildcard ? imp.package() : imp.name;
    std::string last = owner.substr(owner.rfind('.') == std::string::npos ? 0 : owner.rfind('.') + 1);
    if (!imp.is_wildcard && project_types.count(imp.simple_name())) continue;
    if (project_types.count(last)) continue;
    imports.push_back(range_text(text, toks, imp.tokens));
  }

  srcmodel::for_each_type(m.types, [&](const TypeDecl& t) {
    std::vector<const MemberDecl*> test_methods;
    std::vector<Candidate> candidates;
    for (const auto& member : t.members) {
      if (member.kind == MemberKind::Method && member.has_annotation("Test")) {
        test_methods.push_back(&member);
        continue;
      }
      Candidate c{member.name, member.range, member.kind == MemberKind::Constructor};
      for (const auto& a : member.annotations)
        if (kLifecycle.count(a.name)) c.lifecycle = true;
      candidates.push_back(c);
    }
    for (const auto& n : t.nested) candidates.push_back({n.name, n.range, false});
    if (test_methods.empty()) return;

    auto scan_names = [&](TokenRange r, std::vector<bool>& included, std::deque<std::size_t>& work) {
      for (std::size_t i = r.first; i < r.last; ++i) {
        if (!toks[i].is_identifier()) continue;
        if (i > 0 && toks[i - 1].is(".") && !(i > 1 && toks[i - 2].is("this"))) continue;
        for (std::size_t c = 0; c < candidates.size(); ++c)
          if (!included[c] && candidates[c].name == toks[i].text && !program.is_local(u, i, toks[i].text)) {
            included[c] = true;
            work.push_back(c);
          }
      }
    };

    for (const MemberDecl* tm : test_methods) {
      std::vector<bool> included(candidates.size(), false);
      std::deque<std::size_t> work;
      for (std::size_t c = 0; c < candidates.size(); ++c)
        if (candidates[c].lifecycle) {
          included[c] = true;
          work.push_back(c);
        }
      scan_names(tm->range, included, work);
      while (!work.empty()) {
        std::size_t c = work.front();
        work.pop_front();
        scan_names(candidates[c].range, included, work);
      }

      TestMethod test;
      test.subsystem_id = out_sub.id;
      test.project = origin.project_id;
      test.unit = origin.unit_id;
      test.test_class = t.name;
      test.name = tm->name;
      test.text = range_text(text, toks, tm->range);
      test.imports = imports;

      std::vector<TokenRange> ranges{tm->range};
      std::set<std::pair<std::size_t, std::size_t>> seen_ranges;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (!included[c]) continue;
        if (!seen_ranges.insert({candidates[c].range.first, candidates[c].range.last}).second) continue;
        test.helpers.push_back({candidates[c].name, range_text(text, toks, candidates[c].range), candidates[c].lifecycle});
        ranges.push_back(candidates[c].range);
      }

      // references
      auto in_ranges = [&](std::size_t i) {
        for (const auto& r : ranges)
          if (i >= r.first && i < r.last) return true;
        return false;
      };
      std::set<std::string> renamed(local_names.begin(), local_names.end());
      for (const auto& c : candidates) renamed.insert(c.name);
      for (const auto& r : ranges) {
        for (std::size_t i = r.first; i < r.last; ++i) {
          const Token& tok = toks[i];
          if (!tok.is_identifier()) continue;
          bool after_dot = i > 0 && toks[i - 1].is(".");
          if (!after_dot && program.is_local(u, i, tok.text)) renamed.insert(tok.text);

          if (i > 0 && toks[i - 1].is("new")) {
            auto q = program.internal_type(u, tok.text);
            if (!q || local_qualified.count(*q)) continue;
            std::size_t j = skip_type_args(toks, i + 1);
            if (j >= toks.size() || !toks[j].is("(")) continue;
            std::size_t close = srcmodel::matching_bracket(toks, j);
            if (close == std::string::npos) continue;
            // anonymous implementation of an interface
            if (program.find_type(*q)->kind == srcmodel::TypeKind::Interface) continue;
            MemberRef ref;
            ref.type = program.find_type(*q)->name;
            ref.kind = MemberKind::Constructor;
            ref.name = ref.type;
            for (auto [a, b] : srcmodel::split_arguments(toks, j, close))
              ref.literal_args.push_back(b == a + 1 ? literal_kind(toks[a]) : "");
            ref.arity = ref.literal_args.size();
            test.refs.push_back(ref);
            continue;
          }
          if (after_dot) {
            auto q = program.receiver_type(u, i - 1);
            if (!q || local_qualified.count(*q)) continue;
            if (program.find_type(*q + "." + tok.text)) continue;
            MemberRef ref;
            ref.type = program.find_type(*q)->name;
            ref.name = tok.text;
            if (i + 1 < toks.size() && toks[i + 1].is("(")) {
              std::size_t close = srcmodel::matching_bracket(toks, i + 1);
              if (close == std::string::npos) continue;
              ref.kind = MemberKind::Method;
              for (auto [a, b] : srcmodel::split_arguments(toks, i + 1, close))
                ref.literal_args.push_back(b == a + 1 ? literal_kind(toks[a]) : "");
              ref.arity = ref.literal_args.size();
            } else {
              ref.kind = MemberKind::Field;
            }
            test.refs.push_back(ref);
            continue;
          }
          if (starts_with_upper(tok.text) && project_types.count(tok.text) && !local_names.count(tok.text) &&
              program.types_named(tok.text).empty())
            test.foreign.push_back(tok.text);
        }
      }
      for (const auto& occ : program.type_occurrences(u)) {
        if (!in_ranges(occ.first) || local_qualified.count(occ.qualified)) continue;
        if (const TypeDecl* td = program.find_type(occ.qualified)) test.types.push_back(td->name);
      }
      sort_unique(test.types);
      sort_unique(test.foreign);

      // hash: test name dropped, helpers appended
      std::vector<std::vector<Token>> parts;
      std::vector<Token> head;
      for (std::size_t i = tm->range.first; i < tm->range.last; ++i)
        if (i != tm->name_token) head.push_back(toks[i]);
      parts.push_back(head);
      for (std::size_t r = 1; r < ranges.size(); ++r)
        parts.emplace_back(toks.begin() + ranges[r].first, toks.begin() + ranges[r].last);
      test.hash = normalized_hash(parts, renamed);
      tests.push_back(std::move(test));
    }
  });
}

}  // namespace

TransformResult transform_tests(const std::vector<corpus::SourceUnit>& units, const extract::Subsystem& retrieved,
                                const corpus::CorpusIndex& index, const match::TransformPlan& plan) {
  TransformResult result;
  std::set<std::string> project_types;
  for (const auto& u : index.units())
    if (u.project_id == retrieved.project_id)
      project_types.insert(u.declared_type_names.begin(), u.declared_type_names.end());

  for (const auto& tu : units) {
    extract::Subsystem combined;
    combined.id = retrieved.id;
    combined.project_id = retrieved.project_id;
    combined.seed_unit = retrieved.seed_unit;
    combined.original_packages = retrieved.original_packages;
    if (std::find(combined.original_packages.begin(), combined.original_packages.end(), tu.package_name) ==
        combined.original_packages.end())
      combined.original_packages.push_back(tu.package_name);
    bool missing = false;
    for (const auto& su : retrieved.units) {
      const corpus::SourceUnit* orig = index.find_unit(su.origin);
      if (!orig) {
        result.diagnostics.push_back(tu.unit_id + ": origin " + su.origin + " not in the index");
        missing = true;
        break;
      }
      combined.units.push_back({orig->relative_path, orig->unit_id, orig->text, orig->loc});
    }
    if (missing) continue;
    combined.units.push_back({tu.relative_path, tu.unit_id, tu.text, tu.loc});

    try {
      extract::Subsystem flat = extract::flatten_packages(combined, retrieved.package_name);
      for (const auto& [q, name] : retrieved.renamed) {
        auto it = flat.renamed.find(q);
        if (it == flat.renamed.end() || it->second != name)
          throw TransformConflict(tu.unit_id + ": type " + q + " flattens differently alongside the tests");
      }
      flat.id = retrieved.id;
      extract::Subsystem out = match::apply_transforms(flat, plan);
      Program program(out.files());
      std::optional<std::size_t> unit;
      for (std::size_t i = 0; i < out.units.size(); ++i)
        if (out.units[i].origin == tu.unit_id)
          for (std::size_t p = 0; p < program.size(); ++p)
            if (program.path(p) == out.units[i].path) unit = p;
      if (!unit) {
        result.diagnostics.push_back(tu.unit_id + ": test unit removed by the plan");
        continue;
      }
      harvest_unit(program, *unit, out, tu, project_types, result.tests);
    } catch (const TransformConflict& e) {
      result.diagnostics.push_back(tu.unit_id + ": " + e.what());
    }
  }
  return result;
}

std::vector<std::string> reference_problems(const TestMethod& test, const abstraction::SubsystemAbs& abs) {
  std::vector<std::string> problems;
  std::set<std::string> internal;
  for (const auto& c : abs.classes) internal.insert(c.name);
  for (const auto& f : test.foreign) problems.push_back("uses project type " + f + " outside the subsystem");
  for (const auto& t : test.types)
    if (!abs.find_class(t)) problems.push_back("uses type " + t + " outside the abstraction");
  for (const auto& ref : test.refs) {
    const abstraction::ClassAbs* cls = abs.find_class(ref.type);
    if (!cls) {
      problems.push_back("uses " + ref.describe() + " outside the abstraction");
      continue;
    }
    // the class and its supertypes inside the abstraction
    std::vector<const abstraction::ClassAbs*> chain;
    std::deque<const abstraction::ClassAbs*> work{cls};
    std::set<std::string> visited;
    while (!work.empty()) {
      const auto* c = work.front();
      work.pop_front();
      if (!visited.insert(c->name).second) continue;
      chain.push_back(c);
      if (ref.kind == MemberKind::Constructor) break;
      for (const auto* list : {&c->extends, &c->implements})
        for (const auto& s : *list)
          if (const auto* sc = abs.find_class(s)) work.push_back(sc);
    }
    bool found = false;
    bool fits = false;
    for (const auto* c : chain)
      for (const auto& member : c->members) {
        if (member.kind != ref.kind) continue;
        if (ref.kind != MemberKind::Constructor && member.name != ref.name) continue;
        if (ref.kind != MemberKind::Field && member.params.size() != ref.arity) continue;
        found = true;
        bool ok = true;
        for (std::size_t i = 0; i < ref.literal_args.size() && i < member.params.size(); ++i)
          if (!literal_fits(ref.literal_args[i], member.params[i].type, internal)) ok = false;
        if (ok) fits = true;
      }
    if (!found) problems.push_back(ref.describe() + " is not in the abstraction");
    else if (!fits) problems.push_back(ref.describe() + " has incompatible arguments");
  }
  sort_unique(problems);
  return problems;
}

std::vector<TestMethod> prune_tests(const std::vector<TestMethod>& tests, const abstraction::SubsystemAbs& abs) {
  std::vector<TestMethod> out;
  for (const auto& t : tests)
    if (reference_problems(t, abs).empty()) out.push_back(t);
  return out;
}

TestSuite dedup_and_assemble(const std::vector<std::vector<TestMethod>>& per_subsystem,
                             const abstraction::SubsystemAbs& abs) {
  TestSuite suite;
  suite.package_name = abs.package_name;
  std::string base = abs.interface_name;
  if (base.empty() && !abs.classes.empty()) base = abs.classes.front().name;
  suite.class_name = base + "SpecTest";
  std::set<std::string> seen;
  for (const auto& list : per_subsystem) {
    for (const auto& t : list) {
      suite.offered[t.subsystem_id]++;
      suite.provenance.emplace(t.subsystem_id, 0);
      if (!seen.insert(t.hash).second) continue;
      suite.provenance[t.subsystem_id]++;
      suite.tests.push_back(t);
      suite.imports.insert(suite.imports.end(), t.imports.begin(), t.imports.end());
    }
  }
  if (!suite.tests.empty()) suite.imports.push_back("import org.junit.jupiter.api.Nested;");
  sort_unique(suite.imports);
  return suite;
}

namespace {

void append_indented(std::string& out, const std::string& text, const std::string& indent) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out += indent + line;
    out += '\n';
  }
}

}  // namespace

std::string TestSuite::render() const {
  std::string out;
  if (!package_name.empty()) out += "package " + package_name + ";\n\n";
  for (const auto& imp : imports) out += imp + "\n";
  if (!imports.empty()) out += "\n";
  out += "public class " + class_name + " {\n";

  // one nested class per originating test class, in order of first test
  std::vector<std::string> keys;
  std::map<std::string, std::vector<const TestMethod*>> groups;
  for (const auto& t : tests) {
    std::string key = t.unit + "#" + t.test_class;
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(&t);
  }
  std::set<std::string> used{class_name};
  for (const auto& key : keys) {
    const auto& group = groups[key];
    std::string name = group.front()->test_class;
    for (int n = 2; used.count(name); ++n) name = group.front()->test_class + std::to_string(n);
    used.insert(name);
    out += "\n    @Nested\n    class " + name + " {\n";
    std::vector<std::string> helper_texts;
    for (const auto* t : group)
      for (const auto& h : t->helpers)
        if (std::find(helper_texts.begin(), helper_texts.end(), h.text) == helper_texts.end())
          helper_texts.push_back(h.text);
    bool first = true;
    for (const auto& h : helper_texts) {
      if (!first) out += "\n";
      append_indented(out, h, "        ");
      first = false;
    }
    for (const auto* t : group) {
      if (!first) out += "\n";
      append_indented(out, t->text, "        ");
      first = false;
    }
    out += "    }\n";
  }
  out += "}\n";
  return out;
}

std::string TestSuite::manifest() const {
  nlohmann::ordered_json j;
  j["package"] = package_name;
  j["class"] = class_name;
  j["tests"] = nlohmann::ordered_json::array();
  for (const auto& t : tests)
    j["tests"].push_back({{"name", t.name},
                          {"subsystem", t.subsystem_id},
                          {"unit", t.unit},
                          {"class", t.test_class},
                          {"hash", t.hash}});
  j["provenance"] = nlohmann::ordered_json::object();
  for (const auto& [id, n] : provenance) j["provenance"][id] = n;
  j["offered"] = nlohmann::ordered_json::object();
  for (const auto& [id, n] : offered) j["offered"][id] = n;
  return j.dump(2) + "\n";
}

}  // namespace specmine::testgen
