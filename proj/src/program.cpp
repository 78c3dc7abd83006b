#include "specmine/program.h"

#include <algorithm>
#include <deque>
#include <functional>

#include "specmine/java_lexer.h"
#include "specmine/java_parser.h"
#include "specmine/text.h"

namespace specmine::srcmodel {

namespace {

const std::string kProject = "program";

bool is_open(const Token& t) { return t.is("(") || t.is("[") || t.is("{"); }
bool is_close(const Token& t) { return t.is(")") || t.is("]") || t.is("}"); }

// Token index where a declared type ending at `end` (inclusive) begins, or
// npos when the tokens there cannot be a type.
std::size_t type_start_before(const std::vector<Token>& toks, std::size_t end) {
  std::size_t k = end;
  while (k > 0 && toks[k].is("]") && toks[k - 1].is("[")) {
    if (k < 2) return std::string::npos;
    k -= 2;
  }
  if (toks[k].is(">")) {
    int depth = 0;
    while (true) {
      if (toks[k].is(">")) ++depth;
      else if (toks[k].is("<") && --depth == 0) break;
      else if (toks[k].is(";") || toks[k].is("{") || toks[k].is("}") || toks[k].is("=")) return std::string::npos;
      if (k == 0) return std::string::npos;
      --k;
    }
    if (k == 0) return std::string::npos;
    --k;
  }
  if (toks[k].kind == TokenKind::Keyword && is_primitive_type(toks[k].text) && toks[k].text != "void") return k;
  if (!toks[k].is_identifier()) return std::string::npos;
  while (k >= 2 && toks[k - 1].is(".") && toks[k - 2].is_identifier()) k -= 2;
  return k;
}

bool ends_declarator(const Token& t) {
  return t.is("=") || t.is(";") || t.is(",") || t.is(":") || t.is(")");
}

}  // namespace

std::size_t matching_bracket(const std::vector<Token>& tokens, std::size_t at) {
  if (at >= tokens.size()) return std::string::npos;
  int depth = 0;
  if (is_open(tokens[at])) {
    for (std::size_t k = at; k < tokens.size(); ++k) {
      if (is_open(tokens[k])) ++depth;
      else if (is_close(tokens[k]) && --depth == 0) return k;
    }
    return std::string::npos;
  }
  if (is_close(tokens[at])) {
    for (std::size_t k = at + 1; k-- > 0;) {
      if (is_close(tokens[k])) ++depth;
      else if (is_open(tokens[k]) && --depth == 0) return k;
    }
  }
  return std::string::npos;
}

std::vector<std::pair<std::size_t, std::size_t>> split_arguments(const std::vector<Token>& tokens, std::size_t open,
                                                                 std::size_t close) {
  std::vector<std::pair<std::size_t, std::size_t>> args;
  if (close <= open + 1) return args;
  std::size_t start = open + 1;
  int depth = 0;
  int angle = 0;
  for (std::size_t k = open + 1; k < close; ++k) {
    const Token& t = tokens[k];
    if (is_open(t)) ++depth;
    else if (is_close(t)) --depth;
    else if (t.is("<") && k > 0 && tokens[k - 1].is_identifier() && specmine::starts_with_upper(tokens[k - 1].text)) ++angle;
    else if (t.is(">") && angle > 0) --angle;
    else if (t.is(",") && depth == 0 && angle == 0) {
      args.emplace_back(start, k);
      start = k + 1;
    }
  }
  args.emplace_back(start, close);
  return args;
}

Program::Program(const std::vector<SourceFile>& files) {
  for (const auto& f : files) {
    paths_.push_back(f.path);
    texts_.push_back(f.text);
    models_.push_back(parse_source(f.text, f.path));
  }
  std::vector<const CompilationModel*> ptrs;
  for (const auto& m : models_) ptrs.push_back(&m);
  resolver_ = Resolver(ptrs, std::vector<std::string>(models_.size(), kProject));

  owners_.resize(models_.size());
  for (std::size_t u = 0; u < models_.size(); ++u) {
    auto& owner = owners_[u];
    owner.assign(models_[u].tokens.size(), {});
    std::function<void(const TypeDecl&)> mark = [&](const TypeDecl& t) {
      for (std::size_t k = t.range.first; k < t.range.last && k < owner.size(); ++k) owner[k] = {&t, nullptr};
      for (const auto& m : t.members)
        for (std::size_t k = m.range.first; k < m.range.last && k < owner.size(); ++k) owner[k] = {&t, &m};
      for (const auto& n : t.nested) mark(n);
    };
    for (const auto& t : models_[u].types) mark(t);
    for_each_type(models_[u].types, [&](const TypeDecl& t) {
      if (types_.emplace(t.qualified_name, std::make_pair(u, &t)).second) type_order_.push_back(t.qualified_name);
    });
  }

  edges_.resize(models_.size());
  for (std::size_t u = 0; u < models_.size(); ++u) {
    for (const auto& target : internal_references(models_[u], u, resolver_)) {
      auto unit = resolver_.unit_of(kProject, target);
      if (unit && *unit != u) edges_[u].insert(*unit);
    }
  }
}

const TypeDecl* Program::find_type(const std::string& qualified) const {
  auto it = types_.find(qualified);
  return it == types_.end() ? nullptr : it->second.second;
}

std::optional<std::size_t> Program::unit_of(const std::string& qualified) const {
  auto it = types_.find(qualified);
  if (it == types_.end()) return std::nullopt;
  return it->second.first;
}

std::vector<std::string> Program::types_named(const std::string& simple) const {
  std::vector<std::string> out;
  for (const auto& q : type_order_)
    if (types_.at(q).second->name == simple) out.push_back(q);
  return out;
}

std::optional<std::string> Program::internal_type(std::size_t unit, const std::string& written) const {
  if (written.empty() || written == "?") return std::nullopt;
  Resolution r = resolver_.resolve(unit, written);
  if (r.kind == ResolutionKind::Internal) return r.target;
  return std::nullopt;
}

std::optional<std::string> Program::internal_type(std::size_t unit, const TypeRef& ref) const {
  if (ref.array_dims > 0) return std::nullopt;
  return internal_type(unit, ref.base);
}

std::vector<std::string> Program::supertypes(const std::string& qualified) const {
  std::vector<std::string> out;
  auto it = types_.find(qualified);
  if (it == types_.end()) return out;
  for (const auto* s : it->second.second->super_types())
    if (auto q = internal_type(it->second.first, *s)) out.push_back(*q);
  return out;
}

std::set<std::string> Program::ancestors(const std::string& qualified) const {
  std::set<std::string> seen{qualified};
  std::deque<std::string> work{qualified};
  while (!work.empty()) {
    auto q = work.front();
    work.pop_front();
    for (const auto& s : supertypes(q))
      if (seen.insert(s).second) work.push_back(s);
  }
  return seen;
}

std::set<std::string> Program::descendants(const std::string& qualified) const {
  std::set<std::string> seen{qualified};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& q : type_order_) {
      if (seen.count(q)) continue;
      for (const auto& s : supertypes(q)) {
        if (seen.count(s)) {
          seen.insert(q);
          grew = true;
          break;
        }
      }
    }
  }
  return seen;
}

const MemberDecl* Program::find_member(const std::string& qualified, const std::string& name, MemberKind kind,
                                       std::optional<std::size_t> arity, std::string* declaring) const {
  std::set<std::string> seen{qualified};
  std::deque<std::string> work{qualified};
  while (!work.empty()) {
    auto q = work.front();
    work.pop_front();
    if (const TypeDecl* t = find_type(q)) {
      for (const auto& m : t->members) {
        if (m.kind != kind || m.name != name) continue;
        if (arity && m.params.size() != *arity) continue;
        if (declaring) *declaring = q;
        return &m;
      }
    }
    for (const auto& s : supertypes(q))
      if (seen.insert(s).second) work.push_back(s);
  }
  return nullptr;
}

const TypeDecl* Program::type_at(std::size_t unit, std::size_t token) const {
  if (token >= owners_[unit].size()) return nullptr;
  return owners_[unit][token].type;
}

const MemberDecl* Program::member_at(std::size_t unit, std::size_t token) const {
  if (token >= owners_[unit].size()) return nullptr;
  return owners_[unit][token].member;
}

std::vector<TypeOccurrence> Program::type_occurrences(std::size_t unit) const {
  const auto& m = models_[unit];
  const auto& toks = m.tokens;
  std::vector<TypeOccurrence> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!toks[i].is_identifier()) continue;
    if (i > 0 && toks[i - 1].is(".")) continue;
    if (!m.package_tokens.empty() && i >= m.package_tokens.first && i < m.package_tokens.last) continue;

    std::vector<std::size_t> parts{i};
    while (parts.back() + 2 < toks.size() && toks[parts.back() + 1].is(".") && toks[parts.back() + 2].is_identifier())
      parts.push_back(parts.back() + 2);

    std::string q;
    std::size_t used = 0;
    std::string joined = toks[i].text;
    std::vector<std::string> prefixes{joined};
    for (std::size_t k = 1; k < parts.size(); ++k) prefixes.push_back(prefixes.back() + "." + toks[parts[k]].text);
    for (std::size_t k = parts.size(); k >= 2; --k) {
      if (types_.count(prefixes[k - 1]) && prefixes[k - 1].find('.') != std::string::npos) {
        // must be package-qualified, not Outer.Inner written from a simple head
        const TypeDecl* t = types_.at(prefixes[k - 1]).second;
        const auto& owner_model = models_[types_.at(prefixes[k - 1]).first];
        std::string pkg_head = owner_model.package_name;
        if (!pkg_head.empty() && prefixes[k - 1].rfind(pkg_head + ".", 0) == 0 && prefixes[k - 1] == pkg_head + "." + t->name) {
          q = prefixes[k - 1];
          used = k;
          out.push_back({i, parts[k - 1], q});
          break;
        }
      }
    }
    if (used == 0) {
      if (auto r = resolver_.resolve_body_identifier(unit, toks[i].text)) {
        q = *r;
        used = 1;
        out.push_back({i, i, q});
      }
    }
    if (used == 0) continue;
    for (std::size_t k = used; k < parts.size(); ++k) {
      std::string next = q + "." + toks[parts[k]].text;
      if (!types_.count(next)) break;
      q = next;
      out.push_back({parts[k], parts[k], q});
    }
    i = parts[used - 1];
  }
  return out;
}

bool Program::is_local(std::size_t unit, std::size_t token, const std::string& name) const {
  const MemberDecl* member = member_at(unit, token);
  if (!member) return false;
  for (const auto& p : member->params)
    if (p.name == name) return true;
  const auto& toks = models_[unit].tokens;
  for (std::size_t j = member->range.first + 1; j <= token && j < toks.size(); ++j) {
    if (!toks[j].is_identifier() || toks[j].text != name) continue;
    if (j + 1 >= toks.size() || !ends_declarator(toks[j + 1])) continue;
    if (type_start_before(toks, j - 1) != std::string::npos) return true;
  }
  return false;
}

std::optional<std::pair<std::size_t, TypeRef>> Program::variable_type(std::size_t unit, std::size_t token,
                                                                      const std::string& name) const {
  const auto& toks = models_[unit].tokens;
  if (const MemberDecl* member = member_at(unit, token)) {
    std::optional<TypeRef> found;
    for (std::size_t j = member->range.first + 1; j < token && j < toks.size(); ++j) {
      if (!toks[j].is_identifier() || toks[j].text != name) continue;
      if (j + 1 >= toks.size() || !ends_declarator(toks[j + 1])) continue;
      std::size_t start = type_start_before(toks, j - 1);
      if (start == std::string::npos) continue;
      std::string text;
      for (std::size_t k = start; k < j; ++k) text += toks[k].text;
      if (text == "return" || text == "new") continue;
      found = parse_type_text(text);
    }
    if (found) return std::make_pair(unit, *found);
    for (const auto& p : member->params)
      if (p.name == name) return std::make_pair(unit, p.type);
  }
  const TypeDecl* t = type_at(unit, token);
  std::string scope = t ? t->qualified_name : std::string();
  while (!scope.empty()) {
    std::string declaring;
    if (const MemberDecl* f = find_member(scope, name, MemberKind::Field, std::nullopt, &declaring))
      return std::make_pair(*unit_of(declaring), f->type);
    auto dot = scope.rfind('.');
    if (dot == std::string::npos) break;
    scope = scope.substr(0, dot);
    if (!types_.count(scope)) break;
  }
  return std::nullopt;
}

std::optional<std::string> Program::receiver_type(std::size_t unit, std::size_t dot) const {
  const auto& toks = models_[unit].tokens;
  if (dot == 0 || dot >= toks.size()) return std::nullopt;
  std::size_t k = dot - 1;
  const Token& tok = toks[k];
  if (tok.is("this")) {
    if (const TypeDecl* t = type_at(unit, k)) return t->qualified_name;
    return std::nullopt;
  }
  if (tok.is("super")) {
    if (const TypeDecl* t = type_at(unit, k)) {
      auto supers = supertypes(t->qualified_name);
      if (!supers.empty()) return supers.front();
    }
    return std::nullopt;
  }
  if (tok.is_identifier()) {
    if (k > 0 && toks[k - 1].is(".")) {
      auto outer = receiver_type(unit, k - 1);
      if (!outer) {
        // package-qualified type name
        for (const auto& occ : type_occurrences(unit))
          if (occ.last == k) return occ.qualified;
        return std::nullopt;
      }
      if (types_.count(*outer + "." + tok.text)) return *outer + "." + tok.text;
      std::string declaring;
      if (const MemberDecl* f = find_member(*outer, tok.text, MemberKind::Field, std::nullopt, &declaring))
        return internal_type(*unit_of(declaring), f->type);
      return std::nullopt;
    }
    if (auto v = variable_type(unit, k, tok.text)) return internal_type(v->first, v->second);
    return resolver_.resolve_body_identifier(unit, tok.text);
  }
  if (tok.is(")")) {
    std::size_t open = matching_bracket(toks, k);
    if (open == std::string::npos || open == 0) return std::nullopt;
    std::size_t before = open - 1;
    if (toks[before].is(">")) {
      int depth = 0;
      while (before > 0) {
        if (toks[before].is(">")) ++depth;
        else if (toks[before].is("<") && --depth == 0) break;
        --before;
      }
      if (before == 0) return std::nullopt;
      --before;
    }
    if (!toks[before].is_identifier()) return std::nullopt;
    std::size_t head = before;
    while (head >= 2 && toks[head - 1].is(".") && toks[head - 2].is_identifier()) head -= 2;
    if (head > 0 && toks[head - 1].is("new")) {
      std::string written;
      for (std::size_t j = head; j <= before; ++j) written += toks[j].text;
      return internal_type(unit, written);
    }
    std::optional<std::string> recv;
    if (before > 0 && toks[before - 1].is(".")) {
      recv = receiver_type(unit, before - 1);
    } else if (const TypeDecl* t = type_at(unit, before)) {
      recv = t->qualified_name;
    }
    if (!recv) return std::nullopt;
    std::size_t arity = split_arguments(toks, open, k).size();
    std::string declaring;
    const MemberDecl* m = find_member(*recv, toks[before].text, MemberKind::Method, arity, &declaring);
    if (!m) m = find_member(*recv, toks[before].text, MemberKind::Method, std::nullopt, &declaring);
    if (!m) return std::nullopt;
    return internal_type(*unit_of(declaring), m->type);
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, MemberOccurrence>> Program::member_occurrences(
    const std::string& qualified, const std::string& name, MemberKind kind, std::optional<std::size_t> arity) const {
  std::vector<std::pair<std::size_t, MemberOccurrence>> out;
  std::set<std::string> family;
  if (kind == MemberKind::Method) {
    std::set<std::string> roots{qualified};
    for (const auto& a : ancestors(qualified)) {
      const TypeDecl* t = find_type(a);
      if (!t) continue;
      for (const auto& m : t->members)
        if (m.kind == kind && m.name == name && (!arity || m.params.size() == *arity)) roots.insert(a);
    }
    for (const auto& r : roots)
      for (const auto& d : descendants(r)) family.insert(d);
  } else {
    family = descendants(qualified);
  }

  auto accepts_arity = [&](std::size_t u, std::size_t open) -> std::optional<std::pair<std::size_t, std::size_t>> {
    const auto& toks = models_[u].tokens;
    std::size_t close = matching_bracket(toks, open);
    if (close == std::string::npos) return std::nullopt;
    if (arity && split_arguments(toks, open, close).size() != *arity) return std::nullopt;
    return std::make_pair(open, close);
  };

  for (std::size_t u = 0; u < models_.size(); ++u) {
    const auto& toks = models_[u].tokens;
    std::set<std::size_t> decl_tokens;
    for_each_type(models_[u].types, [&](const TypeDecl& t) {
      bool in_family = family.count(t.qualified_name) != 0;
      for (const auto& m : t.members) {
        decl_tokens.insert(m.name_token);
        if (!in_family || m.kind != kind) continue;
        if (kind == MemberKind::Constructor) {
          if (t.qualified_name != qualified) continue;
        } else if (m.name != name) {
          continue;
        }
        if (kind == MemberKind::Field && t.qualified_name != qualified) continue;
        if (arity && kind != MemberKind::Field && m.params.size() != *arity) continue;
        MemberOccurrence occ;
        occ.token = m.name_token;
        occ.is_declaration = true;
        if (kind != MemberKind::Field) occ.call_parens = std::make_pair(m.params_open, m.params_close);
        out.emplace_back(u, occ);
      }
    });

    if (kind == MemberKind::Constructor) {
      const TypeDecl* target = find_type(qualified);
      if (!target) continue;
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].is("new")) {
          std::size_t j = i + 1;
          std::string written;
          while (j < toks.size() && toks[j].is_identifier()) {
            written += toks[j].text;
            if (j + 1 < toks.size() && toks[j + 1].is(".")) {
              written += ".";
              j += 2;
            } else {
              ++j;
              break;
            }
          }
          std::size_t name_tok = j - 1;
          if (j < toks.size() && toks[j].is("<")) {
            int depth = 0;
            while (j < toks.size()) {
              if (toks[j].is("<")) ++depth;
              else if (toks[j].is(">") && --depth == 0) break;
              ++j;
            }
            ++j;
          }
          if (j >= toks.size() || !toks[j].is("(")) continue;
          if (internal_type(u, written) != qualified) continue;
          if (auto parens = accepts_arity(u, j)) out.emplace_back(u, MemberOccurrence{name_tok, false, parens});
        } else if ((toks[i].is("this") || toks[i].is("super")) && i + 1 < toks.size() && toks[i + 1].is("(")) {
          const MemberDecl* m = member_at(u, i);
          const TypeDecl* t = type_at(u, i);
          if (!m || !t || m->kind != MemberKind::Constructor) continue;
          bool hit = toks[i].is("this") ? t->qualified_name == qualified : [&] {
            auto s = supertypes(t->qualified_name);
            return !s.empty() && s.front() == qualified;
          }();
          if (!hit) continue;
          if (auto parens = accepts_arity(u, i + 1)) out.emplace_back(u, MemberOccurrence{i, false, parens});
        }
      }
      continue;
    }

    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!toks[i].is_identifier() || toks[i].text != name || decl_tokens.count(i)) continue;
      bool call = i + 1 < toks.size() && toks[i + 1].is("(");
      if ((kind == MemberKind::Method) != call) continue;
      if (!member_at(u, i) && !(kind == MemberKind::Field && type_at(u, i))) continue;
      bool hit = false;
      if (i > 0 && toks[i - 1].is(".")) {
        if (i > 1 && toks[i - 2].is("this")) {
          const TypeDecl* t = type_at(u, i);
          hit = t && !family.empty() && [&] {
            for (const auto& a : ancestors(t->qualified_name))
              if (family.count(a)) return true;
            return false;
          }();
        } else {
          auto r = receiver_type(u, i - 1);
          hit = r && family.count(*r) != 0;
          if (r && !hit && kind == MemberKind::Method) {
            for (const auto& a : ancestors(*r))
              if (family.count(a)) hit = true;
          }
        }
      } else if (i > 0 && toks[i - 1].is("::")) {
        continue;
      } else {
        if (kind == MemberKind::Field && is_local(u, i, name)) continue;
        if (kind == MemberKind::Field && i + 1 < toks.size() && ends_declarator(toks[i + 1]) &&
            type_start_before(toks, i - 1) != std::string::npos)
          continue;
        const TypeDecl* t = type_at(u, i);
        std::string scope = t ? t->qualified_name : std::string();
        while (!scope.empty() && !hit) {
          for (const auto& a : ancestors(scope)) {
            if (family.count(a)) {
              hit = true;
              break;
            }
          }
          if (hit) break;
          if (find_member(scope, name, kind)) break;  // shadowed by an inner declaration
          auto dot = scope.rfind('.');
          if (dot == std::string::npos) break;
          scope = scope.substr(0, dot);
          if (!types_.count(scope)) break;
        }
      }
      if (!hit) continue;
      MemberOccurrence occ;
      occ.token = i;
      if (call) {
        auto parens = accepts_arity(u, i + 1);
        if (!parens) continue;
        occ.call_parens = parens;
      }
      out.emplace_back(u, occ);
    }
  }
  return out;
}

}  // namespace specmine::srcmodel
