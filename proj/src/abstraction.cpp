#include "specmine/abstraction.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "specmine/error.h"
#include "specmine/java_lexer.h"
#include "specmine/java_parser.h"
#include "specmine/matching.h"
#include "specmine/program.h"
#include "specmine/text.h"

namespace specmine::abstraction {

using srcmodel::CompilationModel;
using srcmodel::MemberDecl;
using srcmodel::TypeDecl;
using srcmodel::TypeRef;
using srcmodel::Visibility;

namespace {

const std::set<std::string> kIntegral = {"byte", "short", "int", "long", "Byte", "Short", "Integer", "Long"};
const std::set<std::string> kFloating = {"float", "double", "Float", "Double"};
const std::set<std::string> kBoolean = {"boolean", "Boolean"};
const std::set<std::string> kChar = {"char", "Character"};
const std::set<std::string> kText = {"String", "CharSequence", "StringBuilder"};

std::string visibility_text(Visibility v) {
  switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Private: return "private";
    case Visibility::Package: return "";
  }
  return "";
}

std::set<std::string> term_set(const std::vector<std::string>& key_terms) {
  std::set<std::string> out;
  for (const auto& k : key_terms) {
    std::string w = to_lower(trim(k));
    if (!w.empty() && w[0] == '@') w = w.substr(1);
    if (w.empty() || w == "...") continue;
    for (const auto& part : split_identifier(w)) out.insert(part);
  }
  return out;
}

template <typename T>
void append_unique(std::vector<T>& into, const std::vector<T>& from) {
  for (const auto& x : from)
    if (std::find(into.begin(), into.end(), x) == into.end()) into.push_back(x);
}

// Replaces whole identifiers of a raw type string through `names`.
std::string translate_type(const std::string& raw, const std::map<std::string, std::string>& names) {
  std::string out;
  std::size_t i = 0;
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
  while (i < raw.size()) {
    if (ident(raw[i])) {
      std::size_t j = i;
      while (j < raw.size() && ident(raw[j])) ++j;
      std::string word = raw.substr(i, j - i);
      bool qualified_part = i > 0 && raw[i - 1] == '.';
      auto it = names.find(word);
      out += (it != names.end() && !qualified_part) ? it->second : word;
      i = j;
    } else {
      out += raw[i++];
    }
  }
  return out;
}

MemberAbs translate_member(MemberAbs m, const std::map<std::string, std::string>& names) {
  m.type = translate_type(m.type, names);
  for (auto& p : m.params) p.type = translate_type(p.type, names);
  if (m.kind == MemberKind::Constructor) {
    auto it = names.find(m.name);
    if (it != names.end()) m.name = it->second;
  }
  return m;
}

std::string render_list(const std::vector<std::string>& items) {
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i] == "..." ? std::string("...") : quote(items[i]);
  }
  return out + "}";
}

std::string render_params(const std::vector<ParamAbs>& params) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ",";
    out += params[i].type + " " + params[i].name;
  }
  return out;
}

}  // namespace

// ---- types -------------------------------------------------------------

TypeAbs classify(const std::string& raw, const std::set<std::string>& internal) {
  TypeAbs out;
  std::string text = trim(raw);
  if (text == "void") {
    out.group = TypeGroup::Void;
    return out;
  }
  TypeRef ref = srcmodel::parse_type_text(text);
  TypeRef scratch;
  if (const TypeRef* el = srcmodel::element_type(ref, scratch)) {
    out.group = TypeGroup::Container;
    out.element.push_back(classify(el->raw, internal));
    return out;
  }
  std::string simple = ref.simple_name();
  if (kIntegral.count(simple)) out.group = TypeGroup::Integral;
  else if (kFloating.count(simple)) out.group = TypeGroup::Floating;
  else if (kBoolean.count(simple)) out.group = TypeGroup::Boolean;
  else if (kChar.count(simple)) out.group = TypeGroup::Char;
  else if (kText.count(simple)) out.group = TypeGroup::Text;
  else if (internal.count(simple)) {
    out.group = TypeGroup::Internal;
    out.name = simple;
  } else {
    out.group = TypeGroup::External;
    out.name = simple;
  }
  return out;
}

std::string to_string(const TypeAbs& t) {
  switch (t.group) {
    case TypeGroup::Integral: return "integral";
    case TypeGroup::Floating: return "floating";
    case TypeGroup::Boolean: return "boolean";
    case TypeGroup::Char: return "char";
    case TypeGroup::Text: return "text";
    case TypeGroup::Void: return "void";
    case TypeGroup::Container: return "container<" + (t.element.empty() ? std::string("?") : to_string(t.element[0])) + ">";
    case TypeGroup::Internal: return "class:" + t.name;
    case TypeGroup::External: return "external:" + t.name;
  }
  return "?";
}

std::vector<std::string> MemberAbs::names() const {
  std::vector<std::string> out{name};
  append_unique(out, alt_names);
  return out;
}

const MemberAbs* ClassAbs::find(MemberKind kind, const std::string& n, std::optional<std::size_t> arity) const {
  for (const auto& m : members) {
    if (m.kind != kind) continue;
    if (kind != MemberKind::Constructor && m.name != n) continue;
    if (arity && m.params.size() != *arity) continue;
    return &m;
  }
  return nullptr;
}

const ClassAbs* SubsystemAbs::find_class(const std::string& n) const {
  for (const auto& c : classes)
    if (c.name == n) return &c;
  return nullptr;
}

std::set<std::string> SubsystemAbs::class_names() const {
  std::set<std::string> out;
  for (const auto& c : classes) out.insert(c.name);
  return out;
}

bool SubsystemAbs::same_structure(const SubsystemAbs& o) const {
  return package_name == o.package_name && interface_name == o.interface_name && classes == o.classes &&
         sources == o.sources && libraries == o.libraries && search == o.search && keywords == o.keywords &&
         keyterms == o.keyterms && suggested_terms == o.suggested_terms && merged_from == o.merged_from &&
         extra_annotations == o.extra_annotations;
}

TypeContext::TypeContext(const SubsystemAbs& left, const SubsystemAbs& right)
    : left_(&left), right_(&right), left_names_(left.class_names()), right_names_(right.class_names()) {}

TypeContext TypeContext::swapped() const { return TypeContext(*right_, *left_); }

bool TypeContext::compatible(const std::string& a, const std::string& b, int depth) {
  return compatible(classify(a, left_names_), classify(b, right_names_), depth);
}

bool TypeContext::compatible(const TypeAbs& a, const TypeAbs& b, int depth) {
  if (a.group != b.group) return false;
  switch (a.group) {
    case TypeGroup::Container:
      return compatible(a.element.front(), b.element.front(), depth);
    case TypeGroup::External:
      return a.name == b.name;
    case TypeGroup::Internal:
      if (depth >= 1) return true;
      return class_similarity(a.name, b.name, depth) >= 0.5;
    default:
      return true;
  }
}

double TypeContext::class_similarity(const std::string& a, const std::string& b, int depth) {
  auto key = std::make_pair(a, b);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second ? 1.0 : 0.0;
  const ClassAbs* ca = left_->find_class(a);
  const ClassAbs* cb = right_->find_class(b);
  if (!ca || !cb) return 0.0;
  std::size_t n = ca->members.size(), m = cb->members.size();
  double sim = 1.0;
  if (std::max(n, m) > 0) {
    match::WeightMatrix w(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        w[i][j] = signature_compatible(ca->members[i], cb->members[j], depth + 1) ? 1.0 : 0.0;
    sim = match::maximum_weight_total(w) / static_cast<double>(std::max(n, m));
  }
  memo_[key] = sim >= 0.5;
  return sim;
}

bool TypeContext::signature_compatible(const MemberAbs& a, const MemberAbs& b, int depth) {
  if (a.kind != b.kind) return false;
  if (a.kind == MemberKind::Field) return compatible(a.type, b.type, depth);
  if (a.kind == MemberKind::Method && !compatible(a.type, b.type, depth)) return false;
  if (a.params.size() != b.params.size()) return false;
  std::size_t n = a.params.size();
  if (n == 0) return true;
  match::WeightMatrix w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i][j] = compatible(a.params[i].type, b.params[j].type, depth) ? 1.0 : 0.0;
  return match::maximum_weight_total(w) == static_cast<double>(n);
}

bool types_compatible(const std::string& a, const std::string& b, const std::set<std::string>& internal) {
  TypeAbs ta = classify(a, internal), tb = classify(b, internal);
  std::function<bool(const TypeAbs&, const TypeAbs&)> same = [&](const TypeAbs& x, const TypeAbs& y) {
    if (x.group != y.group) return false;
    if (x.group == TypeGroup::Container) return same(x.element.front(), y.element.front());
    if (x.group == TypeGroup::Internal || x.group == TypeGroup::External) return x.name == y.name;
    return true;
  };
  return same(ta, tb);
}

double name_similarity(const std::string& a, const std::string& b) {
  auto wa = word_set(a), wb = word_set(b);
  if (wa.empty() && wb.empty()) return a == b ? 1.0 : 0.0;
  std::size_t common = 0;
  for (const auto& w : wa) common += wb.count(w);
  std::size_t total = wa.size() + wb.size() - common;
  return total == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(total);
}

double member_name_similarity(const MemberAbs& a, const MemberAbs& b) {
  if (a.kind == MemberKind::Constructor && b.kind == MemberKind::Constructor) return 1.0;
  double best = 0.0;
  for (const auto& x : a.names())
    for (const auto& y : b.names()) best = std::max(best, name_similarity(x, y));
  return best;
}

// ---- class abstraction -------------------------------------------------

ClassAbs abstract_class(const TypeDecl& type, const std::vector<std::string>& key_terms) {
  std::set<std::string> terms = term_set(key_terms);
  auto has_term = [&](const std::vector<std::string>& words) {
    for (const auto& w : words)
      if (terms.count(w)) return true;
    return false;
  };
  auto public_method = [&](const std::string& name, std::size_t arity) {
    for (const auto& m : type.members)
      if (m.kind == MemberKind::Method && m.name == name && m.params.size() == arity &&
          m.visibility == Visibility::Public)
        return true;
    return false;
  };

  ClassAbs c;
  c.name = type.name;
  c.is_interface = type.kind == srcmodel::TypeKind::Interface;
  for (const auto& e : type.extends) c.extends.push_back(e.raw);
  for (const auto& i : type.implements) c.implements.push_back(i.raw);
  for (const auto& m : type.members) {
    bool relevant = m.visibility == Visibility::Public || m.visibility == Visibility::Protected;
    if (!relevant) {
      std::vector<std::string> words = split_identifier(m.name);
      for (const auto& t : m.body) {
        if (t.is_identifier()) {
          auto w = split_identifier(t.text);
          words.insert(words.end(), w.begin(), w.end());
        } else if (t.kind == srcmodel::TokenKind::StringLiteral) {
          auto w = split_words(t.text);
          words.insert(words.end(), w.begin(), w.end());
        }
      }
      auto cw = split_words(m.comment);
      words.insert(words.end(), cw.begin(), cw.end());
      relevant = has_term(words);
    }
    if (!relevant && m.kind == MemberKind::Field && m.visibility == Visibility::Private) {
      std::string pascal = to_pascal_case(m.name);
      bool getter = public_method("get" + pascal, 0) || public_method("is" + pascal, 0);
      relevant = getter && public_method("set" + pascal, 1);
    }
    if (!relevant) continue;
    MemberAbs a;
    a.kind = m.kind;
    a.name = m.name;
    a.visibility = m.kind == MemberKind::Field ? "private" : visibility_text(m.visibility);
    a.is_static = m.is_static;
    if (m.kind != MemberKind::Constructor) a.type = m.type.raw;
    for (const auto& p : m.params) a.params.push_back({p.name, p.type.raw});
    c.members.push_back(std::move(a));
  }
  return c;
}

ClassMerge merge_class_abs(const ClassAbs& a, const ClassAbs& b, TypeContext& ctx) {
  ClassMerge out;
  std::size_t n = a.members.size(), m = b.members.size();
  match::WeightMatrix w(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (ctx.signature_compatible(a.members[i], b.members[j]))
        w[i][j] = 0.5 + 0.5 * member_name_similarity(a.members[i], b.members[j]);
  auto assignment = match::maximum_weight_matching(w);
  out.pairs = assignment.pairs;
  out.score = std::max(n, m) == 0 ? 0.0 : assignment.total / static_cast<double>(std::max(n, m));

  out.merged = a;
  std::vector<char> b_matched(m, 0);
  for (auto [i, j] : assignment.pairs) {
    b_matched[j] = 1;
    auto& target = out.merged.members[i];
    if (target.kind == MemberKind::Constructor) continue;
    for (const auto& name : b.members[j].names())
      if (name != target.name && std::find(target.alt_names.begin(), target.alt_names.end(), name) == target.alt_names.end())
        target.alt_names.push_back(name);
  }
  for (std::size_t j = 0; j < m; ++j)
    if (!b_matched[j]) out.merged.members.push_back(b.members[j]);
  append_unique(out.merged.uses, b.uses);
  append_unique(out.merged.sources, b.sources);
  return out;
}

ClassMerge merge_class_abs(const ClassAbs& a, const ClassAbs& b) {
  SubsystemAbs left, right;
  left.classes.push_back(a);
  right.classes.push_back(b);
  TypeContext ctx(left, right);
  return merge_class_abs(a, b, ctx);
}

// ---- subsystem abstraction ---------------------------------------------

SubsystemAbs abstract_subsystem(const extract::Subsystem& subsystem, const std::vector<std::string>& key_terms) {
  srcmodel::Program program(subsystem.files());
  std::vector<std::string> order;
  std::set<std::string> test_types;
  for (std::size_t u = 0; u < program.size(); ++u) {
    bool test_unit = extract::is_test_unit(program.model(u));
    srcmodel::for_each_type(program.model(u).types, [&](const TypeDecl& t) {
      if (test_unit) test_types.insert(t.qualified_name);
    });
  }
  for (const auto& q : program.type_names())
    if (!test_types.count(q)) order.push_back(q);

  std::map<std::string, ClassAbs> abs;
  for (const auto& q : order) abs[q] = abstract_class(*program.find_type(q), key_terms);

  std::set<std::string> initial;
  for (const auto& q : order) {
    const TypeDecl* t = program.find_type(q);
    if (t->visibility == Visibility::Private) continue;
    if (abs[q].members.size() >= 2) initial.insert(q);
  }
  std::set<std::string> selected;
  for (const auto& q : initial) {
    bool subtype = false;
    for (const auto& a : program.ancestors(q))
      if (a != q && initial.count(a)) subtype = true;
    if (!subtype) selected.insert(q);
  }

  auto refs_of = [&](const std::string& q) {
    std::vector<std::string> out;
    std::size_t unit = *program.unit_of(q);
    const TypeDecl* t = program.find_type(q);
    std::function<void(const TypeRef&)> visit = [&](const TypeRef& r) {
      if (auto hit = program.internal_type(unit, r.base)) out.push_back(*hit);
      for (const auto& a : r.args) visit(a);
    };
    const ClassAbs& c = abs[q];
    for (const auto& m : t->members) {
      bool kept = false;
      for (const auto& am : c.members)
        if (am.name == m.name && am.kind == m.kind && am.params.size() == m.params.size()) kept = true;
      if (!kept) continue;
      if (!m.type.raw.empty()) visit(m.type);
      for (const auto& p : m.params) visit(p.type);
    }
    return out;
  };

  std::set<std::string> added;
  for (const auto& q : selected)
    for (const auto& r : refs_of(q))
      if (!selected.count(r) && !test_types.count(r)) added.insert(r);
  selected.insert(added.begin(), added.end());

  SubsystemAbs out;
  out.id = subsystem.id;
  out.relevancy = subsystem.relevancy;
  out.package_name = subsystem.package_name;
  out.merged_from = {subsystem.id};
  out.sources = {"CORPUS:" + subsystem.seed_unit};
  for (const auto& l : subsystem.libraries) out.libraries.push_back(l.coordinate());
  for (const auto& u : subsystem.units) {
    if (u.origin != subsystem.seed_unit) continue;
    auto m = srcmodel::parse_source(u.text);
    if (!m.types.empty()) out.interface_name = m.types[0].name;
  }
  if (out.interface_name.empty()) out.interface_name = subsystem.id.substr(subsystem.id.rfind('.') + 1);

  std::map<std::string, std::string> simple;
  std::set<std::string> used_names;
  for (const auto& q : order) {
    if (!selected.count(q)) continue;
    const TypeDecl* t = program.find_type(q);
    if (!used_names.insert(t->name).second) continue;
    simple[q] = t->name;
  }
  for (const auto& q : order) {
    if (!simple.count(q)) continue;
    ClassAbs c = abs[q];
    c.sources = {subsystem.id + ":" + q};
    std::size_t unit = *program.unit_of(q);
    const TypeDecl* t = program.find_type(q);
    auto keep_super = [&](const TypeRef& r) {
      auto hit = program.internal_type(unit, r.base);
      return !hit || simple.count(*hit);
    };
    c.extends.clear();
    c.implements.clear();
    for (const auto& e : t->extends)
      if (keep_super(e)) c.extends.push_back(e.raw);
    for (const auto& i : t->implements)
      if (keep_super(i)) c.implements.push_back(i.raw);
    std::vector<std::string> refs = refs_of(q);
    for (const auto& s : program.supertypes(q)) refs.push_back(s);
    for (const auto& r : order) {
      if (r == q || !simple.count(r)) continue;
      if (std::find(refs.begin(), refs.end(), r) != refs.end()) c.uses.push_back(simple[r]);
    }
    auto dot = q.rfind('.');
    if (dot != std::string::npos && program.find_type(q.substr(0, dot))) {
      const TypeDecl* outer = program.find_type(q.substr(0, dot));
      if (simple.count(outer->qualified_name)) c.outer = outer->name;
    }
    out.classes.push_back(std::move(c));
  }
  if (out.classes.empty()) throw EmptyAbstraction("no class of " + subsystem.id + " survives abstraction");
  return out;
}

SubsystemMerge merge_subsystem_abs(const SubsystemAbs& a, const SubsystemAbs& b, double threshold,
                                   double class_threshold) {
  SubsystemMerge out;
  TypeContext ctx(a, b);
  std::size_t n = a.classes.size(), m = b.classes.size();
  match::WeightMatrix w(n, std::vector<double>(m, 0.0));
  std::vector<std::vector<ClassMerge>> merges(n, std::vector<ClassMerge>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      merges[i][j] = merge_class_abs(a.classes[i], b.classes[j], ctx);
      if (merges[i][j].score >= class_threshold) w[i][j] = merges[i][j].score;
    }
  }
  auto assignment = match::maximum_weight_matching(w);
  out.class_pairs = assignment.pairs;
  for (auto [i, j] : assignment.pairs) out.class_scores.push_back(w[i][j]);
  out.score = std::max(n, m) == 0 ? 0.0 : assignment.total / static_cast<double>(std::max(n, m));
  if (out.score < threshold || out.score <= 0.0) return out;

  std::map<std::string, std::string> names;
  std::set<std::string> taken = a.class_names();
  std::vector<int> match_of_b(m, -1);
  for (auto [i, j] : assignment.pairs) {
    match_of_b[j] = static_cast<int>(i);
    names[b.classes[j].name] = a.classes[i].name;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (match_of_b[j] >= 0) continue;
    std::string name = b.classes[j].name;
    for (int k = 2; taken.count(name); ++k) name = b.classes[j].name + std::to_string(k);
    taken.insert(name);
    names[b.classes[j].name] = name;
  }
  auto translate_names = [&](std::vector<std::string> list) {
    for (auto& x : list) x = translate_type(x, names);
    return list;
  };

  SubsystemAbs merged = a;
  for (auto [i, j] : assignment.pairs) {
    ClassAbs& target = merged.classes[i];
    const ClassMerge& cm = merges[i][j];
    std::vector<char> matched(b.classes[j].members.size(), 0);
    for (auto [x, y] : cm.pairs) matched[y] = 1;
    ClassAbs result = cm.merged;
    result.members.resize(target.members.size());
    for (std::size_t y = 0; y < b.classes[j].members.size(); ++y)
      if (!matched[y]) result.members.push_back(translate_member(b.classes[j].members[y], names));
    result.uses = target.uses;
    append_unique(result.uses, translate_names(b.classes[j].uses));
    target = std::move(result);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (match_of_b[j] >= 0) continue;
    ClassAbs c = b.classes[j];
    c.name = names[c.name];
    for (auto& mem : c.members) mem = translate_member(mem, names);
    c.uses = translate_names(c.uses);
    c.extends = translate_names(c.extends);
    c.implements = translate_names(c.implements);
    if (!c.outer.empty()) c.outer = names.count(c.outer) ? names[c.outer] : c.outer;
    merged.classes.push_back(std::move(c));
  }
  append_unique(merged.sources, b.sources);
  append_unique(merged.libraries, b.libraries);
  append_unique(merged.merged_from, b.merged_from);
  merged.relevancy = std::max(a.relevancy, b.relevancy);
  out.merged = std::move(merged);
  return out;
}

bool presentation_before(const SubsystemAbs& a, const SubsystemAbs& b) {
  if (a.merged_from.size() != b.merged_from.size()) return a.merged_from.size() > b.merged_from.size();
  if (a.relevancy != b.relevancy) return a.relevancy > b.relevancy;
  return a.id < b.id;
}

std::vector<SubsystemAbs> merge_all(std::vector<SubsystemAbs> list, double threshold, double class_threshold) {
  while (list.size() > 1) {
    std::sort(list.begin(), list.end(), presentation_before);
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    std::optional<SubsystemAbs> best_merged;
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        auto r = merge_subsystem_abs(list[i], list[j], threshold, class_threshold);
        if (!r.merged) continue;
        if (r.score > best) {
          best = r.score;
          bi = i;
          bj = j;
          best_merged = std::move(r.merged);
        }
      }
    }
    if (!best_merged) break;
    list[bi] = std::move(*best_merged);
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::sort(list.begin(), list.end(), presentation_before);
  return list;
}

std::vector<std::string> suggested_terms(const SubsystemAbs& abs, const std::vector<extract::Subsystem>& subsystems,
                                         const corpus::CorpusIndex& index, std::size_t k) {
  if (k == 0) return {};
  std::map<std::string, std::unique_ptr<srcmodel::Program>> programs;
  std::map<std::string, double> score;
  std::set<std::string> done;
  for (const auto& c : abs.classes) {
    for (const auto& src : c.sources) {
      if (!done.insert(src).second) continue;
      auto colon = src.find(':');
      if (colon == std::string::npos) continue;
      std::string sub_id = src.substr(0, colon), qualified = src.substr(colon + 1);
      const extract::Subsystem* sub = nullptr;
      for (const auto& s : subsystems)
        if (s.id == sub_id) sub = &s;
      if (!sub) continue;
      auto& prog = programs[sub_id];
      if (!prog) prog = std::make_unique<srcmodel::Program>(sub->files());
      const TypeDecl* t = prog->find_type(qualified);
      if (!t) continue;
      const auto& toks = prog->model(*prog->unit_of(qualified)).tokens;
      corpus::TermCounts counts;
      for (std::size_t i = t->range.first; i < t->range.last && i < toks.size(); ++i) {
        if (!toks[i].is_identifier()) continue;
        for (const auto& w : split_identifier(toks[i].text))
          if (w.size() >= 2 && !std::isdigit(static_cast<unsigned char>(w[0]))) counts[w] += 1;
      }
      for (const auto& [w, n] : counts) score[w] += corpus::tf_idf(w, counts, index, corpus::Granularity::Unit);
    }
  }
  std::vector<std::pair<std::string, double>> ranked(score.begin(), score.end());
  ranked.erase(std::remove_if(ranked.begin(), ranked.end(), [](const auto& p) { return p.second <= 0.0; }), ranked.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

// ---- rendering -----------------------------------------------------------

std::string render_interface(const SubsystemAbs& abs) {
  std::ostringstream out;
  for (const auto& s : abs.sources) out << "@Ascus(source=" << quote(s) << ")\n";
  for (const auto& l : abs.libraries) out << "@Ascus(library=" << quote(l) << ")\n";
  if (!abs.search.empty()) out << "@Ascus(search=" << quote(abs.search) << ")\n";
  if (!abs.keywords.empty()) out << "@Ascus(keywords=" << render_list(abs.keywords) << ")\n";
  if (!abs.keyterms.empty()) out << "@Ascus(keyterms=" << render_list(abs.keyterms) << ")\n";
  if (!abs.suggested_terms.empty()) out << "@Ascus(suggestedTerms=" << render_list(abs.suggested_terms) << ")\n";
  if (!abs.merged_from.empty()) out << "@Ascus(mergedFrom=" << render_list(abs.merged_from) << ")\n";
  for (const auto& e : abs.extra_annotations) out << e << "\n";
  out << "package " << abs.package_name << ";\n";
  out << "@AscusPackage\n";
  out << "public interface " << abs.interface_name << " {\n";
  for (const auto& c : abs.classes) {
    std::vector<std::string> args;
    if (!c.uses.empty()) {
      std::string u = "uses={";
      for (std::size_t i = 0; i < c.uses.size(); ++i) u += (i ? "," : "") + c.uses[i] + ".class";
      args.push_back(u + "}");
    }
    if (!c.sources.empty()) args.push_back("sources=" + render_list(c.sources));
    if (!c.outer.empty()) args.push_back("outer=" + quote(c.outer));
    out << "@AscusClass";
    if (!args.empty()) out << "(" << join(args, ",") << ")";
    out << "\n";
    out << (c.is_interface ? "interface " : "abstract class ") << c.name;
    if (!c.extends.empty()) out << " extends " << join(c.extends, ",");
    if (!c.implements.empty()) out << " implements " << join(c.implements, ",");
    out << " {\n";
    for (const auto& m : c.members) {
      if (!m.alt_names.empty()) out << "   @AscusMember(names=" << render_list(m.alt_names) << ")\n";
      out << "   ";
      std::string vis = m.visibility.empty() ? "" : m.visibility + " ";
      std::string stat = m.is_static ? "static " : "";
      switch (m.kind) {
        case MemberKind::Field:
          out << vis << stat << m.type << " " << m.name << ";";
          break;
        case MemberKind::Constructor:
          out << vis << m.name << "(" << render_params(m.params) << ") { }";
          break;
        case MemberKind::Method:
          if (c.is_interface) out << stat << m.type << " " << m.name << "(" << render_params(m.params) << ");";
          else out << vis << stat << "abstract " << m.type << " " << m.name << "(" << render_params(m.params) << ");";
          break;
      }
      out << "\n";
    }
    out << "}\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

struct AnnotationValue {
  bool is_list = false;
  std::vector<std::string> items;
};

std::string unquote(const std::string& literal) {
  std::string body = literal.size() >= 2 ? literal.substr(1, literal.size() - 2) : literal;
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      char c = body[++i];
      switch (c) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: out += c;
      }
    } else {
      out += body[i];
    }
  }
  return out;
}

std::map<std::string, AnnotationValue> parse_annotation_args(const std::string& text, std::size_t line,
                                                             std::size_t column) {
  auto lexed = srcmodel::lex(text);
  const auto& t = lexed.tokens;
  auto fail = [&](const std::string& what) { throw AbstractionSyntaxError("malformed annotation: " + what, line, column); };
  if (!lexed.diagnostics.empty()) fail(lexed.diagnostics.front().message);
  std::map<std::string, AnnotationValue> out;
  std::size_t i = 0;
  auto item = [&](AnnotationValue& v) {
    if (i >= t.size()) fail("missing value");
    if (t[i].kind == srcmodel::TokenKind::StringLiteral) {
      v.items.push_back(unquote(t[i].text));
      ++i;
    } else if (t[i].is("...")) {
      v.items.push_back("...");
      ++i;
    } else if (t[i].is_identifier()) {
      std::string name = t[i].text;
      ++i;
      while (i + 1 < t.size() && t[i].is(".") && t[i + 1].is_identifier()) {
        name += "." + t[i + 1].text;
        i += 2;
      }
      if (i + 1 < t.size() && t[i].is(".") && t[i + 1].is("class")) i += 2;
      else fail("expected '.class' after '" + name + "'");
      v.items.push_back(name);
    } else {
      fail("unexpected '" + t[i].text + "'");
    }
  };
  while (i < t.size()) {
    if (!t[i].is_identifier()) fail("expected element name");
    std::string key = t[i].text;
    ++i;
    if (i >= t.size() || !t[i].is("=")) fail("expected '=' after '" + key + "'");
    ++i;
    AnnotationValue v;
    if (i < t.size() && t[i].is("{")) {
      v.is_list = true;
      ++i;
      while (i < t.size() && !t[i].is("}")) {
        item(v);
        if (i < t.size() && t[i].is(",")) ++i;
        else if (i < t.size() && !t[i].is("}")) fail("expected ',' or '}'");
      }
      if (i >= t.size()) fail("unterminated list");
      ++i;
    } else {
      item(v);
    }
    if (out.count(key)) fail("duplicate element '" + key + "'");
    out[key] = std::move(v);
    if (i < t.size()) {
      if (!t[i].is(",")) fail("expected ','");
      ++i;
    }
  }
  return out;
}

std::string single(const std::map<std::string, AnnotationValue>& args, const std::string& key, std::size_t line,
                   std::size_t column) {
  const auto& v = args.at(key);
  if (v.is_list || v.items.size() != 1) throw AbstractionSyntaxError("'" + key + "' expects a single value", line, column);
  return v.items.front();
}

}  // namespace

SubsystemAbs parse_abstraction(const std::string& text) {
  CompilationModel m = srcmodel::parse_source(text, "abstraction");
  if (!m.diagnostics.empty())
    throw AbstractionSyntaxError(m.diagnostics.front().message, m.diagnostics.front().line, m.diagnostics.front().column);
  if (m.types.size() != 1 || m.types[0].kind != srcmodel::TypeKind::Interface) {
    std::size_t line = m.types.empty() ? 1 : m.tokens[m.types[0].name_token].line;
    throw AbstractionSyntaxError("expected exactly one top-level interface", line, 1);
  }
  SubsystemAbs abs;
  abs.package_name = m.package_name;
  const TypeDecl& top = m.types[0];
  abs.interface_name = top.name;

  for (const auto& a : m.package_annotations) {
    const auto& first = m.tokens[a.tokens.first];
    std::string verbatim = text.substr(first.offset, m.tokens[a.tokens.last - 1].end() - first.offset);
    if (a.name != "Ascus") {
      abs.extra_annotations.push_back(verbatim);
      continue;
    }
    auto args = parse_annotation_args(a.args_text, first.line, first.column);
    if (args.size() != 1) throw AbstractionSyntaxError("@Ascus takes exactly one element", first.line, first.column);
    const auto& [key, value] = *args.begin();
    if (key == "source") abs.sources.push_back(single(args, key, first.line, first.column));
    else if (key == "library") abs.libraries.push_back(single(args, key, first.line, first.column));
    else if (key == "search") abs.search = single(args, key, first.line, first.column);
    else if (key == "keywords") abs.keywords = value.items;
    else if (key == "keyterms") abs.keyterms = value.items;
    else if (key == "suggestedTerms") abs.suggested_terms = value.items;
    else if (key == "mergedFrom") abs.merged_from = value.items;
    else abs.extra_annotations.push_back(verbatim);
  }

  for (const auto& t : top.nested) {
    ClassAbs c;
    c.name = t.name;
    c.is_interface = t.kind == srcmodel::TypeKind::Interface;
    for (const auto& e : t.extends) c.extends.push_back(e.raw);
    for (const auto& i : t.implements) c.implements.push_back(i.raw);
    for (const auto& a : t.annotations) {
      if (a.name != "AscusClass" || !a.has_args) continue;
      const auto& first = m.tokens[a.tokens.first];
      auto args = parse_annotation_args(a.args_text, first.line, first.column);
      for (const auto& [key, value] : args) {
        if (key == "uses") c.uses = value.items;
        else if (key == "sources") c.sources = value.items;
        else if (key == "outer") c.outer = single(args, key, first.line, first.column);
        else throw AbstractionSyntaxError("unknown @AscusClass element '" + key + "'", first.line, first.column);
      }
    }
    for (const auto& mem : t.members) {
      MemberAbs a;
      a.kind = mem.kind;
      a.name = mem.name;
      a.visibility = visibility_text(mem.visibility);
      a.is_static = mem.is_static && !(c.is_interface && mem.kind == MemberKind::Field);
      if (mem.kind != MemberKind::Constructor) a.type = mem.type.raw;
      for (const auto& p : mem.params) a.params.push_back({p.name, p.type.raw});
      for (const auto& an : mem.annotations) {
        if (an.name != "AscusMember" || !an.has_args) continue;
        const auto& first = m.tokens[an.tokens.first];
        auto args = parse_annotation_args(an.args_text, first.line, first.column);
        if (args.count("names")) a.alt_names = args.at("names").items;
      }
      c.members.push_back(std::move(a));
    }
    abs.classes.push_back(std::move(c));
  }
  return abs;
}

std::string render_uml(const SubsystemAbs& abs) {
  auto esc = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  };
  auto vis_mark = [](const std::string& v) {
    if (v == "public") return "+";
    if (v == "protected") return "#";
    if (v == "private") return "-";
    return "~";
  };
  const int width = 280, gap = 60, top = 20;
  std::vector<int> heights;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out << "<diagram program=\"umlet\" version=\"14.3.0\">\n";
  out << "  <zoom_level>10</zoom_level>\n";
  for (std::size_t i = 0; i < abs.classes.size(); ++i) {
    const auto& c = abs.classes[i];
    std::vector<std::string> fields, ops;
    for (const auto& m : c.members) {
      std::vector<std::string> params;
      for (const auto& p : m.params) params.push_back(p.name + ": " + p.type);
      std::string stat = m.is_static ? "_" : "";
      if (m.kind == MemberKind::Field) {
        fields.push_back(stat + vis_mark(m.visibility) + m.name + ": " + m.type + stat);
      } else {
        std::string sig = vis_mark(m.kind == MemberKind::Method && c.is_interface ? "public" : m.visibility) + m.name +
                          "(" + join(params, ", ") + ")";
        if (m.kind == MemberKind::Method) sig += ": " + m.type;
        ops.push_back(stat + sig + stat);
      }
    }
    std::string body = c.is_interface ? "<<interface>>\n" + c.name : "/" + c.name + "/";
    body += "\n--\n" + join(fields, "\n") + (fields.empty() ? "" : "\n") + "--\n" + join(ops, "\n");
    int h = 20 * static_cast<int>(4 + fields.size() + ops.size() + (c.is_interface ? 1 : 0));
    heights.push_back(h);
    out << "  <element>\n";
    out << "    <id>UMLClass</id>\n";
    out << "    <coordinates>\n";
    out << "      <x>" << 20 + static_cast<int>(i) * (width + gap) << "</x>\n";
    out << "      <y>" << top << "</y>\n";
    out << "      <w>" << width << "</w>\n";
    out << "      <h>" << h << "</h>\n";
    out << "    </coordinates>\n";
    out << "    <panel_attributes>" << esc(body) << "</panel_attributes>\n";
    out << "    <additional_attributes/>\n";
    out << "  </element>\n";
  }
  for (std::size_t i = 0; i < abs.classes.size(); ++i) {
    for (const auto& u : abs.classes[i].uses) {
      std::size_t j = 0;
      while (j < abs.classes.size() && abs.classes[j].name != u) ++j;
      if (j == abs.classes.size() || j == i) continue;
      int x1 = 20 + static_cast<int>(i) * (width + gap) + width / 2;
      int x2 = 20 + static_cast<int>(j) * (width + gap) + width / 2;
      int y1 = top + heights[i];
      int y2 = top + heights[j];
      int drop = 40 + 10 * static_cast<int>(i % 4);
      int x = std::min(x1, x2), w = std::abs(x2 - x1);
      int ymax = std::max(y1, y2) + drop;
      out << "  <element>\n";
      out << "    <id>Relation</id>\n";
      out << "    <coordinates>\n";
      out << "      <x>" << x << "</x>\n";
      out << "      <y>" << top << "</y>\n";
      out << "      <w>" << std::max(w, 10) << "</w>\n";
      out << "      <h>" << ymax - top << "</h>\n";
      out << "    </coordinates>\n";
      out << "    <panel_attributes>lt=&lt;.\nuses</panel_attributes>\n";
      out << "    <additional_attributes>" << x1 - x << ".0;" << y1 - top << ".0;" << x1 - x << ".0;"
          << ymax - top << ".0;" << x2 - x << ".0;" << ymax - top << ".0;" << x2 - x << ".0;" << y2 - top
          << ".0</additional_attributes>\n";
      out << "  </element>\n";
    }
  }
  out << "</diagram>\n";
  return out.str();
}

std::vector<srcmodel::SourceFile> render_stub_code(const SubsystemAbs& abs) {
  std::string dir = abs.package_name;
  std::replace(dir.begin(), dir.end(), '.', '/');
  std::set<std::string> names = abs.class_names();

  std::function<void(const ClassAbs&, const std::string&, std::ostringstream&)> emit =
      [&](const ClassAbs& c, const std::string& indent, std::ostringstream& out) {
        bool nested = !indent.empty();
        out << indent << "public " << (nested ? "static " : "") << (c.is_interface ? "interface " : "class ") << c.name;
        if (!c.extends.empty()) out << " extends " << join(c.extends, ", ");
        if (!c.implements.empty()) out << " implements " << join(c.implements, ", ");
        out << " {\n";
        std::string in = indent + "    ";
        for (const auto& m : c.members) {
          std::vector<std::string> params;
          for (const auto& p : m.params) params.push_back(p.type + " " + p.name);
          std::string vis = m.visibility.empty() ? "" : m.visibility + " ";
          std::string stat = m.is_static ? "static " : "";
          if (m.kind == MemberKind::Field) {
            out << in << (m.visibility == "private" ? std::string("public ") : vis) << stat << m.type << " " << m.name << ";\n";
          } else if (m.kind == MemberKind::Constructor) {
            out << in << vis << c.name << "(" << join(params, ", ") << ") {\n" << in << "}\n";
          } else if (c.is_interface) {
            out << in << stat << m.type << " " << m.name << "(" << join(params, ", ") << ");\n";
          } else {
            out << in << vis << stat << m.type << " " << m.name << "(" << join(params, ", ") << ") {\n";
            out << in << "    throw new UnsupportedOperationException(" << quote("not implemented: " + m.name) << ");\n";
            out << in << "}\n";
          }
        }
        for (const auto& inner : abs.classes)
          if (inner.outer == c.name) emit(inner, in, out);
        out << indent << "}\n";
      };

  std::vector<srcmodel::SourceFile> files;
  for (const auto& c : abs.classes) {
    if (!c.outer.empty() && names.count(c.outer)) continue;
    std::ostringstream out;
    if (!abs.package_name.empty()) out << "package " << abs.package_name << ";\n\n";
    emit(c, "", out);
    files.push_back({(dir.empty() ? "" : dir + "/") + c.name + ".java", out.str()});
  }
  return files;
}

}  // namespace specmine::abstraction
