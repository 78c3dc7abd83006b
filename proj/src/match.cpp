#include "specmine/match.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "specmine/edits.h"
#include "specmine/error.h"
#include "specmine/java_lexer.h"
#include "specmine/java_parser.h"
#include "specmine/program.h"
#include "specmine/text.h"

namespace specmine::match {

using abstraction::ClassAbs;
using abstraction::SubsystemAbs;
using extract::Subsystem;
using extract::SubsystemUnit;
using srcmodel::MemberDecl;
using srcmodel::Program;
using srcmodel::SourceFile;
using srcmodel::TypeDecl;
using srcmodel::Visibility;

namespace {

const char* kStubMarker = "not implemented: ";

std::string visibility_text(Visibility v) {
  switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Private: return "private";
    case Visibility::Package: return "";
  }
  return "";
}

MemberAbs member_abs(const MemberDecl& m) {
  MemberAbs a;
  a.kind = m.kind;
  a.name = m.name;
  a.visibility = visibility_text(m.visibility);
  a.is_static = m.is_static;
  if (m.kind != MemberKind::Constructor) a.type = m.type.raw;
  for (const auto& p : m.params) a.params.push_back({p.name, p.type.raw});
  return a;
}

std::string translate_type(const std::string& raw, const std::map<std::string, std::string>& names) {
  std::string out;
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
  std::size_t i = 0;
  while (i < raw.size()) {
    if (!ident(raw[i])) {
      out += raw[i++];
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && ident(raw[j])) ++j;
    std::string word = raw.substr(i, j - i);
    auto it = names.find(word);
    out += (it != names.end() && !(i > 0 && raw[i - 1] == '.')) ? it->second : word;
    i = j;
  }
  return out;
}

std::string enclosing_type(const Program& program, const std::string& q) {
  auto dot = q.rfind('.');
  if (dot == std::string::npos) return {};
  std::string parent = q.substr(0, dot);
  return program.find_type(parent) ? parent : std::string();
}

std::string package_dir(const std::string& package) {
  std::string dir = package;
  std::replace(dir.begin(), dir.end(), '.', '/');
  return dir;
}

std::string file_stem(const std::string& path) {
  auto slash = path.rfind('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

std::string file_dir(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

std::set<std::string> class_words(const Program& program, const std::string& q) {
  std::set<std::string> words;
  const TypeDecl* t = program.find_type(q);
  if (!t) return words;
  std::size_t unit = *program.unit_of(q);
  const auto& m = program.model(unit);
  const auto& toks = m.tokens;
  for (std::size_t i = t->range.first; i < t->range.last && i < toks.size(); ++i) {
    if (toks[i].is_identifier()) {
      for (auto& w : split_identifier(toks[i].text)) words.insert(w);
    } else if (toks[i].kind == srcmodel::TokenKind::StringLiteral) {
      for (auto& w : split_words(toks[i].text)) words.insert(w);
    }
  }
  if (t->range.last > t->range.first && t->range.last <= toks.size()) {
    std::size_t begin = toks[t->range.first].offset, end = toks[t->range.last - 1].end();
    for (const auto& c : m.comments)
      if (c.offset >= begin && c.offset < end)
        for (auto& w : split_words(c.text)) words.insert(w);
  }
  for (auto& w : split_words(t->comment)) words.insert(w);
  return words;
}

std::set<std::string> abstraction_words(const ClassAbs& c) {
  std::set<std::string> words = word_set(c.name);
  for (const auto& m : c.members) {
    if (m.kind == MemberKind::Constructor) continue;
    for (const auto& n : m.names())
      for (auto& w : split_identifier(n)) words.insert(w);
  }
  return words;
}

bool same_member_slot(const MemberAbs& a, MemberKind kind, const std::string& name, std::size_t arity) {
  if (a.kind != kind || a.name != name) return false;
  return kind == MemberKind::Field || a.params.size() == arity;
}

}  // namespace

// ---- matching --------------------------------------------------------------

const RetrievedClass* MatchMapping::find_retrieved(const std::string& qualified) const {
  for (const auto& c : retrieved_classes)
    if (c.qualified == qualified) return &c;
  return nullptr;
}

std::vector<std::size_t> parameter_permutation(const MemberAbs& target, const MemberAbs& source,
                                               abstraction::TypeContext& ctx) {
  std::size_t n = target.params.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n == 0 || source.params.size() != n) return perm;
  WeightMatrix w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (ctx.compatible(target.params[i].type, source.params[j].type))
        w[i][j] = 1.0 + 0.5 * name_similarity(target.params[i].name, source.params[j].name);
  auto a = maximum_weight_matching(w);
  std::vector<char> used(n, 0), set(n, 0);
  for (auto [i, j] : a.pairs) {
    perm[i] = j;
    used[j] = set[i] = 1;
  }
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (set[i]) continue;
    while (used[next]) ++next;
    perm[i] = next;
    used[next] = 1;
  }
  return perm;
}

MatchMapping match_subsystem(const SubsystemAbs& edited, const Subsystem& retrieved, const MatchOptions& options) {
  MatchMapping out;
  out.subsystem_id = retrieved.id;
  out.edited = edited;
  try {
    out.retrieved_abs = abstraction::abstract_subsystem(retrieved, options.key_terms);
  } catch (const EmptyAbstraction&) {
    throw NoViableMatch("no abstraction for " + retrieved.id, 0.0);
  }

  Program program(retrieved.files());
  for (const auto& q : program.type_names()) {
    const TypeDecl* t = program.find_type(q);
    RetrievedClass rc;
    rc.qualified = q;
    rc.name = t->name;
    std::string outer = enclosing_type(program, q);
    if (!outer.empty()) rc.outer = program.find_type(outer)->name;
    rc.is_interface = t->kind == srcmodel::TypeKind::Interface;
    for (const auto& m : t->members) rc.members.push_back(member_abs(m));
    out.retrieved_classes.push_back(std::move(rc));
  }

  const SubsystemAbs& ra = out.retrieved_abs;
  std::vector<std::string> qualified;
  for (const auto& c : ra.classes) {
    std::string src = c.sources.empty() ? std::string() : c.sources.front();
    qualified.push_back(src.substr(src.find(':') + 1));
  }

  abstraction::TypeContext ctx(edited, ra);
  std::size_t n = edited.classes.size(), m = ra.classes.size();
  WeightMatrix w(n, std::vector<double>(m, 0.0));
  std::vector<std::vector<abstraction::ClassMerge>> merges(n, std::vector<abstraction::ClassMerge>(m));
  std::vector<std::vector<double>> word_scores(n, std::vector<double>(m, 0.0));
  std::vector<std::vector<std::vector<std::string>>> evidence(n, std::vector<std::vector<std::string>>(m));
  std::vector<std::set<std::string>> retrieved_words;
  for (const auto& q : qualified) retrieved_words.push_back(class_words(program, q));
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> words = abstraction_words(edited.classes[i]);
    for (std::size_t j = 0; j < m; ++j) {
      merges[i][j] = abstraction::merge_class_abs(edited.classes[i], ra.classes[j], ctx);
      if (merges[i][j].score < options.class_threshold) continue;
      for (const auto& word : words)
        if (retrieved_words[j].count(word)) evidence[i][j].push_back(word);
      word_scores[i][j] = words.empty() ? 0.0 : static_cast<double>(evidence[i][j].size()) / words.size();
      w[i][j] = options.signature_weight * merges[i][j].score + options.word_weight * word_scores[i][j];
    }
  }
  auto assignment = maximum_weight_matching(w);
  out.score = std::max(n, m) == 0 ? 0.0 : assignment.total / static_cast<double>(std::max(n, m));
  if (out.score < options.threshold)
    throw NoViableMatch(retrieved.id + " matches with score " + std::to_string(out.score), out.score);

  for (auto [i, j] : assignment.pairs) {
    const ClassAbs& ec = edited.classes[i];
    const ClassAbs& rc = ra.classes[j];
    out.class_pairs.push_back({qualified[j], ec.name, w[i][j], merges[i][j].score, word_scores[i][j]});
    out.type_map[qualified[j]] = ec.name;
    out.word_evidence.push_back(ec.name + " ~ " + rc.name + ": " + join(evidence[i][j], ","));
    for (auto [x, y] : merges[i][j].pairs) {
      MemberPair mp;
      mp.abs_class = ec.name;
      mp.abs_member = x;
      mp.retrieved_class = qualified[j];
      mp.retrieved = rc.members[y];
      mp.permutation = parameter_permutation(ec.members[x], rc.members[y], ctx);
      double sim = abstraction::member_name_similarity(ec.members[x], rc.members[y]);
      mp.weight = 0.5 + 0.5 * sim;
      out.member_pairs.push_back(std::move(mp));
    }
  }

  // members left out of the retrieved abstraction but present in the code
  std::map<std::string, std::string> simple_names;
  for (const auto& [q, name] : out.type_map) {
    const RetrievedClass* rc = out.find_retrieved(q);
    if (rc && rc->name != name) simple_names[rc->name] = name;
  }
  for (const auto& cp : out.class_pairs) {
    const ClassAbs& ec = *edited.find_class(cp.abs_class);
    const RetrievedClass& rc = *out.find_retrieved(cp.retrieved);
    auto identical = [](const MemberAbs& a, const MemberAbs& b) {
      if (a.kind != b.kind || a.name != b.name || a.params.size() != b.params.size()) return false;
      for (std::size_t p = 0; p < a.params.size(); ++p)
        if (a.params[p].type != b.params[p].type) return false;
      return true;
    };
    std::set<std::size_t> paired_abs, taken;
    for (const auto& mp : out.member_pairs)
      if (mp.retrieved_class == cp.retrieved) {
        paired_abs.insert(mp.abs_member);
        for (std::size_t k = 0; k < rc.members.size(); ++k)
          if (identical(rc.members[k], mp.retrieved)) taken.insert(k);
      }
    auto same_signature = [&](const MemberAbs& want, const MemberAbs& have) {
      if (want.kind != have.kind || want.params.size() != have.params.size()) return false;
      if (want.kind != MemberKind::Constructor &&
          (want.name != have.name || translate_type(have.type, simple_names) != want.type))
        return false;
      for (std::size_t p = 0; p < want.params.size(); ++p)
        if (translate_type(have.params[p].type, simple_names) != want.params[p].type) return false;
      return true;
    };
    for (std::size_t x = 0; x < ec.members.size(); ++x) {
      if (paired_abs.count(x)) continue;
      for (std::size_t k = 0; k < rc.members.size(); ++k) {
        if (taken.count(k) || !same_signature(ec.members[x], rc.members[k])) continue;
        MemberPair mp;
        mp.abs_class = ec.name;
        mp.abs_member = x;
        mp.retrieved_class = cp.retrieved;
        mp.retrieved = rc.members[k];
        for (std::size_t p = 0; p < rc.members[k].params.size(); ++p) mp.permutation.push_back(p);
        mp.weight = 1.0;
        out.member_pairs.push_back(std::move(mp));
        taken.insert(k);
        break;
      }
    }
  }
  return out;
}

// ---- plans -----------------------------------------------------------------

std::string to_string(OpKind kind) {
  switch (kind) {
    case OpKind::SetPackage: return "SetPackage";
    case OpKind::RenameType: return "RenameType";
    case OpKind::MoveClass: return "MoveClass";
    case OpKind::RenameMember: return "RenameMember";
    case OpKind::ChangeType: return "ChangeType";
    case OpKind::ReorderParams: return "ReorderParams";
    case OpKind::AddStub: return "AddStub";
    case OpKind::RemoveUnused: return "RemoveUnused";
    case OpKind::ApplyNamingConventions: return "ApplyNamingConventions";
  }
  return "?";
}

std::string TransformOp::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  auto member_ref = [&] {
    std::string s = type + "." + member;
    if (member_kind != MemberKind::Field) s += "/" + (arity ? std::to_string(*arity) : std::string("*"));
    return s;
  };
  switch (kind) {
    case OpKind::SetPackage: out << " " << value; break;
    case OpKind::RenameType: out << " " << type << " -> " << value; break;
    case OpKind::MoveClass: out << " " << type << " -> " << (value.empty() ? "(top level)" : value); break;
    case OpKind::RenameMember: out << " " << member_ref() << " -> " << value; break;
    case OpKind::ChangeType:
      out << " " << member_ref() << (param ? " param " + std::to_string(*param) : std::string(" type")) << " -> " << value;
      break;
    case OpKind::ReorderParams: {
      std::vector<std::string> p;
      for (auto i : permutation) p.push_back(std::to_string(i));
      out << " " << member_ref() << " (" << join(p, ",") << ")";
      break;
    }
    case OpKind::AddStub:
      if (stub_class) out << " class " << stub_class->name << (value.empty() ? "" : " in " + value);
      else out << " " << type << "." << stub.name << "/" << stub.params.size();
      break;
    default: break;
  }
  return out.str();
}

std::size_t TransformPlan::count(OpKind kind) const {
  return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [&](const TransformOp& op) { return op.kind == kind; }));
}

std::string TransformPlan::describe() const {
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) out += std::to_string(i + 1) + ". " + ops[i].describe() + "\n";
  return out;
}

TransformPlan plan_transforms(const MatchMapping& mapping, const NamingConventions& conventions, bool remove_unused) {
  TransformPlan plan;
  plan.subsystem_id = mapping.subsystem_id;
  plan.target = mapping.edited;
  const SubsystemAbs& target = mapping.edited;
  const std::string& pkg = target.package_name;

  TransformOp set_package;
  set_package.kind = OpKind::SetPackage;
  set_package.value = pkg;
  plan.ops.push_back(set_package);

  std::map<std::string, std::string> current, outer_of;
  for (const auto& rc : mapping.retrieved_classes) {
    current[rc.qualified] = rc.name;
    auto dot = rc.qualified.rfind('.');
    std::string parent = dot == std::string::npos ? std::string() : rc.qualified.substr(0, dot);
    outer_of[rc.qualified] = mapping.find_retrieved(parent) ? parent : std::string();
  }
  std::function<std::string(const std::string&)> cur_q = [&](const std::string& q) {
    const std::string& o = outer_of[q];
    std::string prefix = o.empty() ? pkg : cur_q(o);
    return prefix.empty() ? current[q] : prefix + "." + current[q];
  };
  auto name_taken = [&](const std::string& name, const std::string& except) {
    for (const auto& [q, n] : current)
      if (n == name && q != except) return true;
    return false;
  };
  std::set<std::string> abstraction_names = target.class_names();
  auto fresh_type = [&](const std::string& base) {
    for (int k = 2;; ++k) {
      std::string c = base + std::to_string(k);
      if (!name_taken(c, "") && !abstraction_names.count(c)) return c;
    }
  };

  // types
  std::vector<std::pair<std::string, std::string>> pending;
  std::set<std::string> matched;
  for (const auto& cp : mapping.class_pairs) {
    matched.insert(cp.retrieved);
    if (current[cp.retrieved] != cp.abs_class) pending.emplace_back(cp.retrieved, cp.abs_class);
  }
  std::set<std::string> wanted;
  for (const auto& [q, name] : pending) wanted.insert(name);
  std::set<std::string> matched_abs;
  for (const auto& cp : mapping.class_pairs) matched_abs.insert(cp.abs_class);
  for (const auto& c : target.classes)
    if (!matched_abs.count(c.name)) wanted.insert(c.name);
  for (const auto& rc : mapping.retrieved_classes)
    if (!matched.count(rc.qualified) && wanted.count(rc.name)) pending.emplace_back(rc.qualified, fresh_type(rc.name));

  auto emit_type_rename = [&](const std::string& q, const std::string& name) {
    TransformOp op;
    op.kind = OpKind::RenameType;
    op.type = cur_q(q);
    op.value = name;
    plan.ops.push_back(op);
    current[q] = name;
  };
  while (!pending.empty()) {
    auto free = std::find_if(pending.begin(), pending.end(),
                             [&](const auto& p) { return !name_taken(p.second, p.first); });
    if (free != pending.end()) {
      emit_type_rename(free->first, free->second);
      pending.erase(free);
    } else {
      emit_type_rename(pending.front().first, fresh_type(pending.front().second + "Tmp"));
    }
  }

  // simple retrieved name -> final name, for comparing written types
  std::map<std::string, std::string> type_names;
  for (const auto& rc : mapping.retrieved_classes)
    if (rc.name != current[rc.qualified]) type_names[rc.name] = current[rc.qualified];

  // nesting
  for (const auto& cp : mapping.class_pairs) {
    const ClassAbs* c = target.find_class(cp.abs_class);
    std::string have = outer_of[cp.retrieved].empty() ? std::string() : current[outer_of[cp.retrieved]];
    if (c->outer == have) continue;
    std::string new_outer;
    if (!c->outer.empty()) {
      for (const auto& [q, n] : current)
        if (n == c->outer) new_outer = q;
      if (new_outer.empty()) continue;
    }
    TransformOp op;
    op.kind = OpKind::MoveClass;
    op.type = cur_q(cp.retrieved);
    op.value = c->outer;
    plan.ops.push_back(op);
    outer_of[cp.retrieved] = new_outer;
  }

  // members
  for (const auto& cp : mapping.class_pairs) {
    const ClassAbs& ac = *target.find_class(cp.abs_class);
    const RetrievedClass& rc = *mapping.find_retrieved(cp.retrieved);
    std::vector<const MemberPair*> pairs;
    for (const auto& mp : mapping.member_pairs)
      if (mp.retrieved_class == cp.retrieved) pairs.push_back(&mp);

    std::vector<MemberAbs> members = rc.members;  // names updated as renames are planned
    auto slot_of = [&](const MemberAbs& r) -> std::size_t {
      for (std::size_t k = 0; k < rc.members.size(); ++k) {
        const auto& m = rc.members[k];
        if (m.kind != r.kind || m.name != r.name || m.params.size() != r.params.size()) continue;
        bool same = true;
        for (std::size_t p = 0; p < m.params.size(); ++p) same = same && m.params[p].type == r.params[p].type;
        if (same) return k;
      }
      return rc.members.size();
    };
    std::vector<std::size_t> slots;
    std::set<std::size_t> paired;
    for (const auto* mp : pairs) {
      slots.push_back(slot_of(mp->retrieved));
      paired.insert(slots.back());
    }

    std::vector<std::pair<std::size_t, std::string>> renames;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const MemberAbs& want = ac.members[pairs[k]->abs_member];
      if (want.kind == MemberKind::Constructor || slots[k] >= members.size()) continue;
      if (members[slots[k]].name != want.name) renames.emplace_back(slots[k], want.name);
    }
    auto occupied = [&](std::size_t self, MemberKind kind, const std::string& name, std::size_t arity) {
      for (std::size_t k = 0; k < members.size(); ++k)
        if (k != self && same_member_slot(members[k], kind, name, arity)) return true;
      return false;
    };
    auto fresh_member = [&](std::size_t self, const std::string& base) {
      for (int k = 2;; ++k) {
        std::string c = base + std::to_string(k);
        bool clash = occupied(self, members[self].kind, c, members[self].params.size());
        for (const auto& am : ac.members) clash = clash || am.name == c;
        if (!clash) return c;
      }
    };
    // unpaired members standing on a name the abstraction needs
    std::vector<std::tuple<MemberKind, std::string, std::size_t>> needed;
    for (const auto& [slot, name] : renames) needed.emplace_back(members[slot].kind, name, members[slot].params.size());
    std::set<std::size_t> paired_abs;
    for (const auto* mp : pairs) paired_abs.insert(mp->abs_member);
    for (std::size_t a = 0; a < ac.members.size(); ++a)
      if (!paired_abs.count(a) && ac.members[a].kind != MemberKind::Constructor)
        needed.emplace_back(ac.members[a].kind, ac.members[a].name, ac.members[a].params.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (paired.count(k) || members[k].kind == MemberKind::Constructor) continue;
      for (const auto& [kind, name, arity] : needed)
        if (same_member_slot(members[k], kind, name, arity)) {
          renames.emplace_back(k, fresh_member(k, members[k].name));
          break;
        }
    }

    auto emit_member_rename = [&](std::size_t slot, const std::string& name) {
      TransformOp op;
      op.kind = OpKind::RenameMember;
      op.type = cur_q(cp.retrieved);
      op.member = members[slot].name;
      op.member_kind = members[slot].kind;
      if (members[slot].kind != MemberKind::Field) op.arity = members[slot].params.size();
      op.value = name;
      plan.ops.push_back(op);
      members[slot].name = name;
    };
    while (!renames.empty()) {
      auto free = std::find_if(renames.begin(), renames.end(), [&](const auto& r) {
        return !occupied(r.first, members[r.first].kind, r.second, members[r.first].params.size());
      });
      if (free != renames.end()) {
        emit_member_rename(free->first, free->second);
        renames.erase(free);
      } else {
        emit_member_rename(renames.front().first, fresh_member(renames.front().first, renames.front().second + "Tmp"));
      }
    }

    for (const auto* mp : pairs) {
      const MemberAbs& want = ac.members[mp->abs_member];
      const MemberAbs& have = mp->retrieved;
      TransformOp base;
      base.type = cur_q(cp.retrieved);
      base.member = want.kind == MemberKind::Constructor ? current[cp.retrieved] : want.name;
      base.member_kind = want.kind;
      if (want.kind != MemberKind::Field) base.arity = want.params.size();
      if (want.kind != MemberKind::Constructor && translate_type(have.type, type_names) != want.type) {
        TransformOp op = base;
        op.kind = OpKind::ChangeType;
        op.value = want.type;
        plan.ops.push_back(op);
      }
      for (std::size_t i = 0; i < want.params.size() && i < mp->permutation.size(); ++i) {
        std::size_t j = mp->permutation[i];
        if (translate_type(have.params[j].type, type_names) == want.params[i].type) continue;
        TransformOp op = base;
        op.kind = OpKind::ChangeType;
        op.param = j;
        op.value = want.params[i].type;
        plan.ops.push_back(op);
      }
      bool identity = true;
      for (std::size_t i = 0; i < mp->permutation.size(); ++i) identity = identity && mp->permutation[i] == i;
      if (!identity) {
        TransformOp op = base;
        op.kind = OpKind::ReorderParams;
        op.permutation = mp->permutation;
        plan.ops.push_back(op);
      }
    }
  }

  // missing elements
  for (const auto& c : target.classes) {
    if (matched_abs.count(c.name)) continue;
    TransformOp op;
    op.kind = OpKind::AddStub;
    op.type = c.name;
    op.value = c.outer;
    op.stub_class = c;
    plan.ops.push_back(op);
  }
  for (const auto& cp : mapping.class_pairs) {
    const ClassAbs& ac = *target.find_class(cp.abs_class);
    std::set<std::size_t> paired_abs;
    for (const auto& mp : mapping.member_pairs)
      if (mp.retrieved_class == cp.retrieved) paired_abs.insert(mp.abs_member);
    for (std::size_t a = 0; a < ac.members.size(); ++a) {
      if (paired_abs.count(a)) continue;
      TransformOp op;
      op.kind = OpKind::AddStub;
      op.type = cur_q(cp.retrieved);
      op.stub = ac.members[a];
      if (op.stub.kind == MemberKind::Constructor) op.stub.name = ac.name;
      plan.ops.push_back(op);
    }
  }

  if (remove_unused) {
    TransformOp op;
    op.kind = OpKind::RemoveUnused;
    plan.ops.push_back(op);
  }
  if (conventions.enabled) {
    TransformOp op;
    op.kind = OpKind::ApplyNamingConventions;
    plan.ops.push_back(op);
  }
  return plan;
}

// ---- engine ----------------------------------------------------------------

namespace {

struct Step {
  const Subsystem& before;
  Program program;
  std::vector<std::vector<TextEdit>> edits;
  std::map<std::size_t, std::string> new_paths;
  std::set<std::size_t> removed;
  std::vector<SubsystemUnit> added;

  explicit Step(const Subsystem& s) : before(s), program(s.files()), edits(s.units.size()) {}

  const std::string& text(std::size_t u) const { return program.text(u); }
  const std::vector<srcmodel::Token>& tokens(std::size_t u) const { return program.model(u).tokens; }

  void replace_token(std::size_t u, std::size_t token, const std::string& text) {
    const auto& t = tokens(u)[token];
    edits[u].push_back({t.offset, t.text.size(), text});
  }

  Subsystem finish() const {
    Subsystem out = before;
    out.units.clear();
    out.total_loc = 0;
    for (std::size_t u = 0; u < before.units.size(); ++u) {
      if (removed.count(u)) continue;
      SubsystemUnit unit = before.units[u];
      unit.text = apply_edits(program.text(u), edits[u]);
      if (auto it = new_paths.find(u); it != new_paths.end()) unit.path = it->second;
      out.units.push_back(std::move(unit));
    }
    for (const auto& a : added) out.units.push_back(a);
    std::set<std::string> paths;
    for (auto& unit : out.units) {
      if (!paths.insert(unit.path).second) throw TransformConflict("two units at " + unit.path);
      unit.loc = srcmodel::count_code_lines(srcmodel::lex(unit.text).tokens);
      out.total_loc += unit.loc;
    }
    std::sort(out.units.begin(), out.units.end(),
              [](const SubsystemUnit& a, const SubsystemUnit& b) { return a.path < b.path; });
    return out;
  }
};

std::string find_type(const Program& program, const std::string& name) {
  if (program.find_type(name)) return name;
  std::string simple = name.substr(name.rfind('.') == std::string::npos ? 0 : name.rfind('.') + 1);
  auto hits = program.types_named(simple);
  if (hits.size() == 1) return hits.front();
  throw TransformConflict(hits.empty() ? "no type " + name : "ambiguous type " + name);
}

std::size_t line_start(const std::string& text, std::size_t offset) {
  while (offset > 0 && text[offset - 1] != '\n') --offset;
  return offset;
}

std::string spaces(std::size_t n) { return std::string(n, ' '); }

std::size_t member_indent(const Program& program, const TypeDecl& t) {
  std::size_t unit = *program.unit_of(t.qualified_name);
  const auto& toks = program.model(unit).tokens;
  if (!t.members.empty()) return toks[t.members.front().range.first].column - 1;
  if (!t.nested.empty()) return toks[t.nested.front().range.first].column - 1;
  return toks[t.range.first].column - 1 + 4;
}

// Inserts `block` (already indented, newline terminated) before the closing
// brace of `t`.
TextEdit insert_into_body(const Program& program, const TypeDecl& t, const std::string& block) {
  std::size_t unit = *program.unit_of(t.qualified_name);
  const std::string& text = program.text(unit);
  std::size_t brace = program.model(unit).tokens[t.body_close].offset;
  std::size_t start = line_start(text, brace);
  bool alone = text.find_first_not_of(" \t", start) == brace;
  if (alone) return {start, 0, block};
  return {brace, 0, "\n" + block};
}

std::string default_value(const std::string& type) {
  if (type == "boolean") return "false";
  if (type == "char") return "'\\0'";
  if (srcmodel::is_primitive_type(type)) return "0";
  return "null";
}

std::string member_stub_text(const MemberAbs& m, const std::string& class_name, bool in_interface,
                             const std::string& indent) {
  std::vector<std::string> params;
  for (const auto& p : m.params) params.push_back(p.type + " " + p.name);
  std::string plist = "(" + join(params, ", ") + ")";
  std::string vis = in_interface || m.visibility.empty() ? "" : m.visibility + " ";
  std::string stat = m.is_static ? "static " : "";
  std::string throw_line = indent + "    throw new UnsupportedOperationException(" + quote(kStubMarker + m.name) + ");\n";
  switch (m.kind) {
    case MemberKind::Field:
      if (in_interface) return indent + m.type + " " + m.name + " = " + default_value(m.type) + ";\n";
      return indent + (m.visibility == "private" ? std::string("public ") : vis) + stat + m.type + " " + m.name + ";\n";
    case MemberKind::Constructor:
      return indent + (m.visibility.empty() ? "" : m.visibility + " ") + class_name + plist + " {\n" + throw_line + indent + "}\n";
    case MemberKind::Method:
      if (in_interface) return indent + (m.is_static ? "static " : "default ") + m.type + " " + m.name + plist + " {\n" + throw_line + indent + "}\n";
      return indent + vis + stat + m.type + " " + m.name + plist + " {\n" + throw_line + indent + "}\n";
  }
  return {};
}

std::string class_stub_text(const ClassAbs& c, const std::vector<ClassAbs>& nested_in, const std::string& indent,
                            bool nested) {
  std::string out = indent + "public " + (nested && !c.is_interface ? "static " : "") +
                    (c.is_interface ? "interface " : "class ") + c.name;
  if (!c.extends.empty()) out += " extends " + join(c.extends, ", ");
  if (!c.implements.empty()) out += " implements " + join(c.implements, ", ");
  out += " {\n";
  for (const auto& m : c.members) out += member_stub_text(m, c.name, c.is_interface, indent + "    ");
  for (const auto& inner : nested_in)
    if (inner.outer == c.name) out += class_stub_text(inner, nested_in, indent + "    ", true);
  return out + indent + "}\n";
}

// Import lines that make the simple names in `types` visible in a unit that
// already has `present` imports.
std::vector<std::string> imports_for(const std::vector<std::string>& types, const Program& program,
                                     const std::set<std::string>& present, const std::set<std::string>& internal) {
  static const std::map<std::string, std::string> util = {
      {"List", "java.util.List"},           {"ArrayList", "java.util.ArrayList"}, {"Map", "java.util.Map"},
      {"HashMap", "java.util.HashMap"},     {"Set", "java.util.Set"},             {"HashSet", "java.util.HashSet"},
      {"Collection", "java.util.Collection"}, {"Optional", "java.util.Optional"}, {"Iterator", "java.util.Iterator"}};
  std::map<std::string, std::string> known;
  for (std::size_t u = 0; u < program.size(); ++u)
    for (const auto& imp : program.model(u).imports)
      if (!imp.is_static && !imp.is_wildcard) known.emplace(imp.simple_name(), imp.name);
  std::set<std::string> out;
  for (const auto& raw : types) {
    auto lexed = srcmodel::lex(raw);
    for (std::size_t i = 0; i < lexed.tokens.size(); ++i) {
      const auto& tok = lexed.tokens[i];
      if (!tok.is_identifier() || (i > 0 && lexed.tokens[i - 1].is("."))) continue;
      if (i + 1 < lexed.tokens.size() && lexed.tokens[i + 1].is(".")) continue;
      if (internal.count(tok.text)) continue;
      std::string full;
      if (auto it = known.find(tok.text); it != known.end()) full = it->second;
      else if (auto jt = util.find(tok.text); jt != util.end()) full = jt->second;
      if (!full.empty() && !present.count(full)) out.insert(full);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> types_of(const ClassAbs& c) {
  std::vector<std::string> out = c.extends;
  out.insert(out.end(), c.implements.begin(), c.implements.end());
  for (const auto& m : c.members) {
    if (!m.type.empty()) out.push_back(m.type);
    for (const auto& p : m.params) out.push_back(p.type);
  }
  return out;
}

std::set<std::string> internal_names(const Program& program) {
  std::set<std::string> out;
  for (const auto& q : program.type_names()) out.insert(program.find_type(q)->name);
  return out;
}

std::set<std::string> imports_present(const srcmodel::CompilationModel& m) {
  std::set<std::string> out;
  for (const auto& imp : m.imports) out.insert(imp.is_wildcard ? imp.name + ".*" : imp.name);
  return out;
}

// Edit adding import lines to a unit, after the last import or the package.
std::optional<TextEdit> add_imports(const Program& program, std::size_t unit, const std::vector<std::string>& names) {
  if (names.empty()) return std::nullopt;
  std::string lines;
  for (const auto& n : names) lines += "import " + n + ";\n";
  const auto& m = program.model(unit);
  const auto& toks = m.tokens;
  const std::string& text = program.text(unit);
  std::size_t after = 0;
  if (!m.imports.empty()) after = toks[m.imports.back().tokens.last - 1].end();
  else if (!m.package_tokens.empty()) after = toks[m.package_tokens.last].end();
  else return TextEdit{0, 0, lines + "\n"};
  std::size_t eol = text.find('\n', after);
  std::size_t at = eol == std::string::npos ? text.size() : eol + 1;
  if (m.imports.empty()) return TextEdit{at, 0, "\n" + lines};
  return TextEdit{at, 0, lines};
}

std::string new_unit_path(const Subsystem& s, const std::string& name) {
  std::string dir = package_dir(s.package_name);
  return (dir.empty() ? "" : dir + "/") + name + ".java";
}

std::string unit_header(const Subsystem& s, const std::vector<std::string>& imports) {
  std::string out;
  if (!s.package_name.empty()) out += "package " + s.package_name + ";\n\n";
  for (const auto& i : imports) out += "import " + i + ";\n";
  if (!imports.empty()) out += "\n";
  return out;
}

bool has_override(const MemberDecl& m) { return m.has_annotation("Override"); }

Subsystem op_set_package(const Subsystem& cur, const TransformOp& op) {
  Subsystem s = cur;
  s.original_packages = {cur.package_name};
  Subsystem out = extract::flatten_packages(s, op.value);
  out.original_packages = cur.original_packages;
  out.renamed = cur.renamed;
  out.diagnostics = cur.diagnostics;
  return out;
}

Subsystem rename_type(const Subsystem& cur, const std::string& type, const std::string& value) {
  Step step(cur);
  const Program& p = step.program;
  std::string q = find_type(p, type);
  const TypeDecl* t = p.find_type(q);
  if (t->name == value) return cur;
  if (!p.types_named(value).empty()) throw TransformConflict("type name " + value + " already in use");
  for (std::size_t u = 0; u < p.size(); ++u)
    for (const auto& occ : p.type_occurrences(u))
      if (occ.qualified == q) step.replace_token(u, occ.last, value);
  std::size_t unit = *p.unit_of(q);
  step.replace_token(unit, t->name_token, value);
  if (enclosing_type(p, q).empty() && file_stem(p.path(unit)) == t->name)
    step.new_paths[unit] = file_dir(p.path(unit)) + value + ".java";
  return step.finish();
}

Subsystem op_move_class(const Subsystem& cur, const TransformOp& op) {
  Step step(cur);
  const Program& p = step.program;
  std::string q = find_type(p, op.type);
  const TypeDecl* t = p.find_type(q);
  std::string dest = op.value.empty() ? std::string() : find_type(p, op.value);
  if (!dest.empty() && (dest == q || dest.rfind(q + ".", 0) == 0))
    throw TransformConflict("cannot move " + q + " into itself");
  if (enclosing_type(p, q) == dest) return cur;
  if (dest.empty() && p.types_named(t->name).size() > 1)
    throw TransformConflict("top-level name " + t->name + " is ambiguous");

  std::size_t unit = *p.unit_of(q);
  const auto& toks = step.tokens(unit);
  const std::string& text = step.text(unit);
  std::size_t begin = toks[t->range.first].offset, end = toks[t->range.last - 1].end();

  // canonical spelling of a type after the move, relative to the package
  std::function<std::string(const std::string&)> canonical = [&](const std::string& x) -> std::string {
    std::string outer = x == q ? dest : enclosing_type(p, x);
    std::string name = p.find_type(x)->name;
    return outer.empty() ? name : canonical(outer) + "." + name;
  };
  std::set<std::string> moved;
  for (const auto& x : p.type_names())
    if (x == q || x.rfind(q + ".", 0) == 0) moved.insert(x);

  std::vector<TextEdit> inner;
  for (std::size_t u = 0; u < p.size(); ++u) {
    const auto& tk = step.tokens(u);
    const auto& model = p.model(u);
    for (const auto& occ : p.type_occurrences(u)) {
      if (occ.qualified != q || (u == unit && occ.last == t->name_token)) continue;
      std::size_t head = occ.first;
      while (head >= 2 && tk[head - 1].is(".") && tk[head - 2].is_identifier()) head -= 2;
      bool in_package_clause = false;
      for (const auto& imp : model.imports)
        if (occ.first >= imp.tokens.first && occ.first < imp.tokens.last) in_package_clause = true;
      std::string replacement = canonical(q);
      if (const TypeDecl* at = p.type_at(u, occ.first); at && !in_package_clause) {
        const std::string& w = at->qualified_name;
        bool sees = w == q || w.rfind(q + ".", 0) == 0 || (!dest.empty() && (w == dest || w.rfind(dest + ".", 0) == 0));
        if (sees) replacement = t->name;
      }
      if (in_package_clause && !cur.package_name.empty()) replacement = cur.package_name + "." + replacement;
      std::size_t b = tk[head].offset, e = tk[occ.last].end();
      if (u == unit && b >= begin && e <= end) inner.push_back({b - begin, e - b, replacement});
      else step.edits[u].push_back({b, e - b, replacement});
    }
  }
  // modifiers of the moved declaration
  std::size_t kw = t->range.first;
  while (kw < t->range.last && !(toks[kw].is("class") || toks[kw].is("interface") || toks[kw].is("enum"))) ++kw;
  bool has_static = false;
  for (std::size_t k = t->range.first; k < kw; ++k) {
    if (toks[k].is("static")) {
      has_static = true;
      if (dest.empty()) inner.push_back({toks[k].offset - begin, toks[k].text.size() + 1, ""});
    }
    if (dest.empty() && (toks[k].is("private") || toks[k].is("protected")))
      inner.push_back({toks[k].offset - begin, toks[k].text.size() + 1, ""});
  }
  if (!dest.empty() && !has_static && toks[kw].is("class"))
    inner.push_back({toks[kw].offset - begin, 0, "static "});
  std::string decl = apply_edits(text.substr(begin, end - begin), inner);

  // re-indent
  std::size_t old_indent = toks[t->range.first].column - 1;
  std::size_t new_indent = dest.empty() ? 0 : member_indent(p, *p.find_type(dest));
  std::istringstream lines(decl);
  std::string line, body;
  bool first = true;
  while (std::getline(lines, line)) {
    if (!first) {
      std::size_t lead = line.find_first_not_of(' ');
      std::size_t strip = std::min(old_indent, lead == std::string::npos ? line.size() : lead);
      line = line.substr(strip);
    }
    body += (line.empty() ? "" : spaces(new_indent)) + line + "\n";
    first = false;
  }

  bool sole = enclosing_type(p, q).empty() && p.model(unit).types.size() == 1;
  if (sole) step.removed.insert(unit);
  else step.edits[unit].push_back(remove_span(text, begin, end));
  std::set<std::string> used_names;
  for (std::size_t k = t->range.first; k < t->range.last; ++k)
    if (toks[k].is_identifier()) used_names.insert(toks[k].text);
  std::vector<std::string> unit_imports;
  for (const auto& imp : p.model(unit).imports)
    if (!imp.is_static && (imp.is_wildcard || used_names.count(imp.simple_name())))
      unit_imports.push_back(imp.is_wildcard ? imp.name + ".*" : imp.name);
  if (dest.empty()) {
    SubsystemUnit added;
    added.origin = cur.units[unit].origin;
    added.path = new_unit_path(cur, t->name);
    added.text = unit_header(cur, unit_imports) + body;
    step.added.push_back(added);
  } else {
    const TypeDecl* d = p.find_type(dest);
    std::size_t dunit = *p.unit_of(dest);
    step.edits[dunit].push_back(insert_into_body(p, *d, body));
    if (dunit != unit) {
      std::set<std::string> present = imports_present(p.model(dunit));
      std::vector<std::string> missing;
      for (const auto& i : unit_imports)
        if (!present.count(i)) missing.push_back(i);
      if (auto e = add_imports(p, dunit, missing)) step.edits[dunit].push_back(*e);
    }
  }
  return step.finish();
}

Subsystem rename_member(const Subsystem& cur, const std::string& type, const std::string& member, MemberKind kind,
                        std::optional<std::size_t> arity, const std::string& value) {
  Step step(cur);
  const Program& p = step.program;
  std::string q = find_type(p, type);
  if (member == value) return cur;
  const MemberDecl* decl = p.find_member(q, member, kind, arity);
  const MemberDecl* clash = p.find_member(q, value, kind, kind == MemberKind::Field ? std::nullopt : arity);
  if (!decl) {
    if (clash) return cur;  // already renamed through its hierarchy
    throw TransformConflict("no member " + member + " in " + q);
  }
  if (clash) throw TransformConflict("member name " + value + " already in use in " + q);
  for (const auto& [u, occ] : p.member_occurrences(q, member, kind, arity)) step.replace_token(u, occ.token, value);
  return step.finish();
}

std::vector<std::pair<std::size_t, const MemberDecl*>> declarations(const Program& p, const std::string& q,
                                                                   const TransformOp& op) {
  std::vector<std::pair<std::size_t, const MemberDecl*>> out;
  if (op.member_kind == MemberKind::Constructor) {
    const TypeDecl* t = p.find_type(q);
    for (const auto& m : t->members)
      if (m.kind == MemberKind::Constructor && (!op.arity || m.params.size() == *op.arity)) {
        out.emplace_back(*p.unit_of(q), &m);
        break;
      }
    return out;
  }
  for (const auto& [u, occ] : p.member_occurrences(q, op.member, op.member_kind, op.arity)) {
    if (!occ.is_declaration) continue;
    const MemberDecl* m = p.member_at(u, occ.token);
    if (m && m->name == op.member && m->kind == op.member_kind) out.emplace_back(u, m);
  }
  return out;
}

Subsystem op_change_type(const Subsystem& cur, const TransformOp& op) {
  Step step(cur);
  const Program& p = step.program;
  std::string q = find_type(p, op.type);
  auto decls = declarations(p, q, op);
  if (decls.empty()) throw TransformConflict("no declaration of " + op.member + " in " + q);
  for (const auto& [u, m] : decls) {
    const srcmodel::TypeRef* ref = nullptr;
    if (op.param) {
      if (*op.param >= m->params.size()) throw TransformConflict("parameter index out of range for " + op.member);
      ref = &m->params[*op.param].type;
    } else {
      ref = &m->type;
    }
    const auto& toks = step.tokens(u);
    if (ref->tokens.empty()) throw TransformConflict("no written type for " + op.member);
    std::size_t b = toks[ref->tokens.first].offset, e = toks[ref->tokens.last - 1].end();
    step.edits[u].push_back({b, e - b, op.value});
  }
  return step.finish();
}

Subsystem op_reorder(const Subsystem& cur, const TransformOp& op) {
  Step step(cur);
  const Program& p = step.program;
  std::string q = find_type(p, op.type);
  std::size_t n = op.permutation.size();
  auto reorder = [&](std::size_t u, const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
    if (spans.size() != n) return;
    const std::string& text = step.text(u);
    for (std::size_t i = 0; i < n; ++i) {
      auto [b, e] = spans[i];
      auto [sb, se] = spans[op.permutation[i]];
      step.edits[u].push_back({b, e - b, text.substr(sb, se - sb)});
    }
  };
  std::vector<std::pair<std::size_t, srcmodel::MemberOccurrence>> occs;
  if (op.member_kind == MemberKind::Constructor) {
    for (const auto& [u, m] : declarations(p, q, op)) {
      srcmodel::MemberOccurrence o;
      o.token = m->name_token;
      o.is_declaration = true;
      occs.emplace_back(u, o);
    }
    // `new T(...)`, `this(...)`, `super(...)`
    for (std::size_t u = 0; u < p.size(); ++u) {
      const auto& toks = step.tokens(u);
      for (const auto& occ : p.type_occurrences(u)) {
        if (occ.qualified != q || occ.first == 0 || !toks[occ.first - 1].is("new")) continue;
        std::size_t open = occ.last + 1;
        if (open >= toks.size() || !toks[open].is("(")) continue;
        srcmodel::MemberOccurrence o;
        o.token = occ.last;
        o.call_parens = std::make_pair(open, srcmodel::matching_bracket(toks, open));
        occs.emplace_back(u, o);
      }
      for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (!(toks[i].is("this") || toks[i].is("super")) || !toks[i + 1].is("(")) continue;
        if (i > 0 && toks[i - 1].is(".")) continue;
        const TypeDecl* at = p.type_at(u, i);
        if (!at) continue;
        std::string owner = toks[i].is("this") ? at->qualified_name : std::string();
        if (toks[i].is("super"))
          for (const auto& s : p.supertypes(at->qualified_name))
            if (p.find_type(s)->kind != srcmodel::TypeKind::Interface) owner = s;
        if (owner != q) continue;
        srcmodel::MemberOccurrence o;
        o.token = i;
        o.call_parens = std::make_pair(i + 1, srcmodel::matching_bracket(toks, i + 1));
        occs.emplace_back(u, o);
      }
    }
  } else {
    occs = p.member_occurrences(q, op.member, op.member_kind, op.arity);
  }
  for (const auto& [u, occ] : occs) {
    const auto& toks = step.tokens(u);
    if (occ.is_declaration) {
      const MemberDecl* m = p.member_at(u, occ.token);
      if (!m) continue;
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      for (const auto& param : m->params)
        spans.emplace_back(toks[param.tokens.first].offset, toks[param.tokens.last - 1].end());
      reorder(u, spans);
    } else if (occ.call_parens && occ.call_parens->second != std::string::npos) {
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      for (auto [a, b] : srcmodel::split_arguments(toks, occ.call_parens->first, occ.call_parens->second))
        spans.emplace_back(toks[a].offset, toks[b - 1].end());
      reorder(u, spans);
    }
  }
  return step.finish();
}

Subsystem op_add_stub(const Subsystem& cur, const TransformOp& op, const SubsystemAbs& target) {
  Step step(cur);
  const Program& p = step.program;
  std::set<std::string> internal = internal_names(p);
  for (const auto& c : target.classes) internal.insert(c.name);

  if (op.stub_class) {
    const ClassAbs& c = *op.stub_class;
    if (!p.types_named(c.name).empty()) throw TransformConflict("type name " + c.name + " already in use");
    std::vector<ClassAbs> none;
    if (!op.value.empty() && !p.types_named(op.value).empty()) {
      std::string dest = find_type(p, op.value);
      const TypeDecl* d = p.find_type(dest);
      std::size_t dunit = *p.unit_of(dest);
      std::string indent = spaces(member_indent(p, *d));
      step.edits[dunit].push_back(insert_into_body(p, *d, class_stub_text(c, none, indent, true)));
      if (auto e = add_imports(p, dunit, imports_for(types_of(c), p, imports_present(p.model(dunit)), internal)))
        step.edits[dunit].push_back(*e);
    } else {
      SubsystemUnit added;
      added.origin = "generated";
      added.path = new_unit_path(cur, c.name);
      added.text = unit_header(cur, imports_for(types_of(c), p, {}, internal)) + class_stub_text(c, none, "", false);
      step.added.push_back(added);
    }
    return step.finish();
  }

  std::string q = find_type(p, op.type);
  const TypeDecl* t = p.find_type(q);
  const MemberAbs& m = op.stub;
  for (const auto& existing : t->members) {
    bool clash = existing.kind == m.kind && (m.kind == MemberKind::Constructor || existing.name == m.name) &&
                 (m.kind == MemberKind::Field || existing.params.size() == m.params.size());
    if (clash) throw TransformConflict("member " + m.name + " already present in " + q);
  }
  bool in_interface = t->kind == srcmodel::TypeKind::Interface;
  std::size_t unit = *p.unit_of(q);
  std::string indent = spaces(member_indent(p, *t));
  step.edits[unit].push_back(insert_into_body(p, *t, member_stub_text(m, t->name, in_interface, indent)));
  ClassAbs holder;
  holder.members = {m};
  if (auto e = add_imports(p, unit, imports_for(types_of(holder), p, imports_present(p.model(unit)), internal)))
    step.edits[unit].push_back(*e);
  return step.finish();
}

Subsystem op_remove_unused(const Subsystem& cur, const SubsystemAbs& target) {
  Step step(cur);
  const Program& p = step.program;
  std::set<std::string> keep_types = target.class_names();
  for (std::size_t u = 0; u < p.size(); ++u) {
    if (extract::is_test_unit(p.model(u))) {
      srcmodel::for_each_type(p.model(u).types, [&](const TypeDecl& t) { keep_types.insert(t.name); });
    }
  }

  for (const auto& q : p.type_names()) {
    const TypeDecl* t = p.find_type(q);
    std::size_t unit = *p.unit_of(q);
    const auto& toks = step.tokens(unit);
    if (keep_types.count(t->name)) {
      const ClassAbs* c = target.find_class(t->name);
      if (!c) continue;
      for (const auto& m : t->members) {
        if (m.kind == MemberKind::Constructor || has_override(m) || m.name == "main") continue;
        bool listed = false;
        for (const auto& am : c->members)
          if (am.kind == m.kind && am.name == m.name) listed = true;
        if (listed) continue;
        std::optional<std::size_t> arity;
        if (m.kind == MemberKind::Method) arity = m.params.size();
        bool used = false;
        for (const auto& [u, occ] : p.member_occurrences(q, m.name, m.kind, arity))
          if (!occ.is_declaration) used = true;
        if (used) continue;
        if (m.kind == MemberKind::Field) {
          // a declaration sharing its statement with other variables stays
          bool shared = false;
          for (const auto& other : t->members)
            if (&other != &m && other.range.first == m.range.first) shared = true;
          if (shared) continue;
        }
        step.edits[unit].push_back(remove_span(step.text(unit), toks[m.range.first].offset, toks[m.range.last - 1].end()));
      }
      continue;
    }
    if (!enclosing_type(p, q).empty() && keep_types.count(p.find_type(enclosing_type(p, q))->name) == 0) continue;
    bool referenced = false;
    std::size_t begin = t->range.first, end = t->range.last;
    for (std::size_t u = 0; u < p.size() && !referenced; ++u)
      for (const auto& occ : p.type_occurrences(u)) {
        if (occ.qualified != q && occ.qualified.rfind(q + ".", 0) != 0) continue;
        if (u == unit && occ.first >= begin && occ.first < end) continue;
        const auto& model = p.model(u);
        bool in_import = false;
        for (const auto& imp : model.imports)
          if (occ.first >= imp.tokens.first && occ.first < imp.tokens.last) in_import = true;
        if (!in_import) referenced = true;
      }
    if (referenced) continue;
    if (enclosing_type(p, q).empty() && p.model(unit).types.size() == 1) {
      step.removed.insert(unit);
    } else {
      step.edits[unit].push_back(remove_span(step.text(unit), toks[begin].offset, toks[end - 1].end()));
    }
  }
  return step.finish();
}

struct Rename {
  bool is_type = false;
  std::string type;
  std::string member;
  MemberKind kind = MemberKind::Method;
  std::optional<std::size_t> arity;
  std::string value;
};

std::optional<Rename> next_convention_rename(const Program& p, const SubsystemAbs& target, std::set<std::string>& tried) {
  std::set<std::string> abs_names = target.class_names();
  for (const auto& q : p.type_names()) {
    const TypeDecl* t = p.find_type(q);
    if (abs_names.count(t->name) || is_pascal_case(t->name)) continue;
    std::string want = to_pascal_case(t->name);
    if (want.empty() || want == t->name || !p.types_named(want).empty()) continue;
    if (!tried.insert("T:" + q).second) continue;
    return Rename{true, q, {}, MemberKind::Method, std::nullopt, want};
  }
  for (const auto& q : p.type_names()) {
    const TypeDecl* t = p.find_type(q);
    const ClassAbs* c = target.find_class(t->name);
    bool is_interface = t->kind == srcmodel::TypeKind::Interface;
    for (const auto& m : t->members) {
      if (m.kind == MemberKind::Constructor || has_override(m)) continue;
      if (c) {
        bool fixed = false;
        for (const auto& am : c->members)
          if (am.kind == m.kind && am.name == m.name) fixed = true;
        if (fixed) continue;
      }
      bool constant = m.kind == MemberKind::Field && ((m.is_static && m.is_final) || is_interface);
      std::string want;
      if (constant) {
        if (is_upper_snake(m.name)) continue;
        want = to_upper_snake(m.name);
      } else {
        if (is_camel_case(m.name)) continue;
        want = to_camel_case(m.name);
      }
      if (want.empty() || want == m.name || srcmodel::is_java_keyword(want)) continue;
      std::optional<std::size_t> arity;
      if (m.kind == MemberKind::Method) arity = m.params.size();
      if (p.find_member(q, want, m.kind, arity)) continue;
      std::string key = "M:" + q + "." + m.name + "/" + std::to_string(m.params.size());
      if (!tried.insert(key).second) continue;
      return Rename{false, q, m.name, m.kind, arity, want};
    }
  }
  return std::nullopt;
}

Subsystem op_conventions(const Subsystem& cur, const SubsystemAbs& target) {
  Subsystem s = cur;
  std::set<std::string> tried;
  for (int round = 0; round < 10000; ++round) {
    std::optional<Rename> r;
    {
      Program p(s.files());
      r = next_convention_rename(p, target, tried);
    }
    if (!r) break;
    try {
      s = r->is_type ? rename_type(s, r->type, r->value) : rename_member(s, r->type, r->member, r->kind, r->arity, r->value);
    } catch (const TransformConflict&) {
      // a convention rename that cannot be applied cleanly is left out
    }
  }
  return s;
}

}  // namespace

Subsystem apply_transforms(const Subsystem& retrieved, const TransformPlan& plan) {
  Subsystem cur = retrieved;
  for (const auto& op : plan.ops) {
    switch (op.kind) {
      case OpKind::SetPackage: cur = op_set_package(cur, op); break;
      case OpKind::RenameType: cur = rename_type(cur, op.type, op.value); break;
      case OpKind::MoveClass: cur = op_move_class(cur, op); break;
      case OpKind::RenameMember: cur = rename_member(cur, op.type, op.member, op.member_kind, op.arity, op.value); break;
      case OpKind::ChangeType: cur = op_change_type(cur, op); break;
      case OpKind::ReorderParams: cur = op_reorder(cur, op); break;
      case OpKind::AddStub: cur = op_add_stub(cur, op, plan.target); break;
      case OpKind::RemoveUnused: cur = op_remove_unused(cur, plan.target); break;
      case OpKind::ApplyNamingConventions: cur = op_conventions(cur, plan.target); break;
    }
  }
  return cur;
}

std::string stub_body(const std::string& member) {
  return "throw new UnsupportedOperationException(" + quote(kStubMarker + member) + ");";
}

std::vector<std::string> stubbed_members(const Subsystem& sub) {
  Program p(sub.files());
  std::vector<std::string> out;
  for (const auto& q : p.type_names()) {
    const TypeDecl* t = p.find_type(q);
    for (const auto& m : t->members)
      for (const auto& tok : m.body)
        if (tok.kind == srcmodel::TokenKind::StringLiteral && tok.text.rfind(std::string("\"") + kStubMarker, 0) == 0) {
          out.push_back(t->name + "." + m.name);
          break;
        }
  }
  return out;
}

std::vector<std::string> signature_mismatches(const Subsystem& code, const SubsystemAbs& target,
                                              const std::vector<std::string>& key_terms) {
  Program p(code.files());
  std::vector<std::string> out;
  for (const auto& c : target.classes) {
    auto hits = p.types_named(c.name);
    if (hits.size() != 1) {
      out.push_back(c.name + ": " + (hits.empty() ? "missing class" : "ambiguous class"));
      continue;
    }
    ClassAbs got = abstraction::abstract_class(*p.find_type(hits.front()), key_terms);
    for (const auto& m : c.members) {
      bool name_found = false, exact = false;
      for (const auto& g : got.members) {
        if (g.kind != m.kind || (m.kind != MemberKind::Constructor && g.name != m.name)) continue;
        name_found = true;
        bool same = g.params.size() == m.params.size() && g.type == m.type && g.is_static == m.is_static;
        for (std::size_t i = 0; same && i < m.params.size(); ++i) same = g.params[i].type == m.params[i].type;
        exact = exact || same;
      }
      std::vector<std::string> params;
      for (const auto& prm : m.params) params.push_back(prm.type);
      std::string sig = c.name + "." + m.name + "(" + join(params, ",") + ")";
      if (!name_found) out.push_back(sig + ": missing");
      else if (!exact) out.push_back(sig + ": signature differs");
    }
  }
  return out;
}

}  // namespace specmine::match
