#include "specmine/java_parser.h"

#include <algorithm>

#include "specmine/error.h"
#include "specmine/text.h"

namespace specmine::srcmodel {

std::string to_string(Visibility v) {
  switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Package: return "package";
    case Visibility::Private: return "private";
  }
  return "package";
}

std::string to_string(TypeKind k) {
  switch (k) {
    case TypeKind::Class: return "class";
    case TypeKind::Interface: return "interface";
    case TypeKind::Enum: return "enum";
  }
  return "class";
}

std::string to_string(MemberKind k) {
  switch (k) {
    case MemberKind::Field: return "field";
    case MemberKind::Method: return "method";
    case MemberKind::Constructor: return "constructor";
  }
  return "field";
}

std::string TypeRef::simple_name() const {
  auto pos = base.rfind('.');
  return pos == std::string::npos ? base : base.substr(pos + 1);
}

bool is_container_name(const std::string& simple_name) {
  static const std::vector<std::string> names = {
      "List",   "ArrayList", "LinkedList", "Set",      "HashSet",   "TreeSet",  "LinkedHashSet",
      "SortedSet", "Collection", "Iterable", "Queue", "Deque", "ArrayDeque", "Vector", "Stack",
      "CopyOnWriteArrayList", "Iterator", "Stream", "Optional", "BlockingQueue", "PriorityQueue"};
  return std::find(names.begin(), names.end(), simple_name) != names.end();
}

const TypeRef* element_type(const TypeRef& ref, TypeRef& scratch) {
  if (ref.array_dims > 0 || ref.varargs) {
    scratch = ref;
    if (scratch.varargs) {
      scratch.varargs = false;
    } else {
      --scratch.array_dims;
    }
    std::string raw = scratch.base;
    if (!scratch.args.empty()) {
      std::vector<std::string> parts;
      for (const auto& a : scratch.args) parts.push_back(a.raw);
      raw += "<" + join(parts, ",") + ">";
    }
    for (int d = 0; d < scratch.array_dims; ++d) raw += "[]";
    scratch.raw = raw;
    return &scratch;
  }
  if (ref.args.size() == 1 && is_container_name(ref.simple_name())) return &ref.args.front();
  return nullptr;
}

bool MemberDecl::has_annotation(const std::string& simple) const {
  for (const auto& a : annotations) {
    auto pos = a.name.rfind('.');
    std::string n = pos == std::string::npos ? a.name : a.name.substr(pos + 1);
    if (n == simple) return true;
  }
  return false;
}

std::vector<const TypeRef*> TypeDecl::super_types() const {
  std::vector<const TypeRef*> out;
  for (const auto& r : extends) out.push_back(&r);
  for (const auto& r : implements) out.push_back(&r);
  return out;
}

std::string ImportDecl::package() const {
  if (is_wildcard) return name;
  auto pos = name.rfind('.');
  return pos == std::string::npos ? std::string{} : name.substr(0, pos);
}

std::string ImportDecl::simple_name() const {
  if (is_wildcard) return {};
  auto pos = name.rfind('.');
  return pos == std::string::npos ? name : name.substr(pos + 1);
}

namespace {

struct Recover {
  std::string message;
  std::size_t at;
};

struct Modifiers {
  Visibility visibility = Visibility::Package;
  bool explicit_visibility = false;
  bool is_static = false;
  bool is_abstract = false;
  bool is_final = false;
  bool is_default = false;
  std::vector<Annotation> annotations;
  std::size_t first = 0;
};

class Parser {
 public:
  Parser(std::string_view text, CompilationModel& model) : text_(text), m_(model), t_(model.tokens) {}

  void parse() {
    std::size_t unit_start = i_;
    Modifiers leading = parse_modifiers();
    if (at("package")) {
      m_.package_annotations = std::move(leading.annotations);
      ++i_;
      std::size_t name_first = i_;
      try {
        m_.package_name = qualified_name();
        m_.package_tokens = {name_first, i_};
        expect(";");
      } catch (const Recover& r) {
        diag(r.message, r.at);
        skip_declaration(name_first);
      }
    } else {
      // modifiers belong to the first type
      i_ = unit_start;
    }
    while (at("import")) parse_import();
    while (!end()) {
      if (at(";")) {
        ++i_;
        continue;
      }
      std::size_t start = i_;
      try {
        Modifiers mods = parse_modifiers();
        if (starts_type()) {
          m_.types.push_back(parse_type(mods, m_.package_name));
        } else if (at("import")) {
          diag("import after type declaration", i_);
          parse_import();
        } else {
          throw Recover{"expected type declaration", i_};
        }
      } catch (const Recover& r) {
        diag(r.message, r.at);
        skip_declaration(start);
      }
    }
  }

 private:
  // ---- token helpers ------------------------------------------------------

  bool end() const { return i_ >= t_.size(); }
  const Token& cur() const { return t_[i_]; }
  bool at(std::string_view s) const { return !end() && t_[i_].is(s); }
  bool at_ahead(std::size_t k, std::string_view s) const {
    return i_ + k < t_.size() && t_[i_ + k].is(s);
  }
  bool at_identifier() const { return !end() && t_[i_].kind == TokenKind::Identifier; }

  void expect(std::string_view s) {
    if (!at(s)) throw Recover{"expected '" + std::string(s) + "'", i_};
    ++i_;
  }

  std::string identifier() {
    if (!at_identifier()) throw Recover{"expected identifier", i_};
    return t_[i_++].text;
  }

  std::string qualified_name() {
    std::string name = identifier();
    while (at(".") && i_ + 1 < t_.size() && t_[i_ + 1].kind == TokenKind::Identifier) {
      ++i_;
      name += "." + identifier();
    }
    return name;
  }

  void diag(const std::string& message, std::size_t at_index) {
    Diagnostic d;
    d.message = message;
    if (at_index < t_.size()) {
      d.line = t_[at_index].line;
      d.column = t_[at_index].column;
    } else if (!t_.empty()) {
      d.line = t_.back().line;
      d.column = t_.back().column + t_.back().text.size();
    }
    m_.diagnostics.push_back(std::move(d));
  }

  /// Index of the matching closer for the opener at `open`.
  std::size_t match_close(std::size_t open) const {
    const std::string& o = t_[open].text;
    std::string c = o == "(" ? ")" : o == "[" ? "]" : "}";
    int depth = 0;
    for (std::size_t k = open; k < t_.size(); ++k) {
      if (t_[k].is(o)) {
        ++depth;
      } else if (t_[k].is(c)) {
        if (--depth == 0) return k;
      }
    }
    throw Recover{"unbalanced '" + o + "'", open};
  }

  /// Skips to just past the next ';' at depth zero or the next balanced
  /// brace block, whichever comes first.
  void skip_declaration(std::size_t start) {
    i_ = std::max(i_, start);
    int depth = 0;
    while (!end()) {
      if (at("(") || at("[")) {
        ++depth;
      } else if (at(")") || at("]")) {
        --depth;
      } else if (at("{")) {
        try {
          i_ = match_close(i_) + 1;
        } catch (const Recover&) {
          i_ = t_.size();
        }
        if (depth <= 0) {
          if (at(";")) ++i_;
          return;
        }
        continue;
      } else if (at("}")) {
        if (i_ == start) ++i_;
        return;
      } else if (at(";") && depth <= 0) {
        ++i_;
        return;
      }
      ++i_;
    }
  }

  // ---- declarations -------------------------------------------------------

  void parse_import() {
    std::size_t first = i_;
    ++i_;
    ImportDecl imp;
    if (at("static")) {
      imp.is_static = true;
      ++i_;
    }
    try {
      imp.name = qualified_name();
      if (at(".") && at_ahead(1, "*")) {
        i_ += 2;
        imp.is_wildcard = true;
      }
      expect(";");
    } catch (const Recover& r) {
      diag(r.message, r.at);
      skip_declaration(first);
      return;
    }
    imp.tokens = {first, i_};
    m_.imports.push_back(std::move(imp));
  }

  Annotation parse_annotation() {
    Annotation a;
    a.tokens.first = i_;
    ++i_;  // '@'
    a.name = qualified_name();
    if (at("(")) {
      std::size_t close = match_close(i_);
      a.has_args = true;
      std::size_t b = t_[i_].end();
      std::size_t e = t_[close].offset;
      a.args_text = std::string(text_.substr(b, e - b));
      i_ = close + 1;
    }
    a.tokens.last = i_;
    return a;
  }

  Modifiers parse_modifiers() {
    Modifiers mods;
    mods.first = i_;
    while (!end()) {
      if (at("@") && !at_ahead(1, "interface")) {
        mods.annotations.push_back(parse_annotation());
        continue;
      }
      const Token& tok = cur();
      if (tok.kind == TokenKind::Keyword) {
        if (tok.text == "public") {
          mods.visibility = Visibility::Public;
          mods.explicit_visibility = true;
        } else if (tok.text == "protected") {
          mods.visibility = Visibility::Protected;
          mods.explicit_visibility = true;
        } else if (tok.text == "private") {
          mods.visibility = Visibility::Private;
          mods.explicit_visibility = true;
        } else if (tok.text == "static") {
          mods.is_static = true;
        } else if (tok.text == "abstract") {
          mods.is_abstract = true;
        } else if (tok.text == "final") {
          mods.is_final = true;
        } else if (tok.text == "default" && !at_ahead(1, ":")) {
          mods.is_default = true;
        } else if (tok.text == "native" || tok.text == "synchronized" || tok.text == "transient" ||
                   tok.text == "volatile" || tok.text == "strictfp") {
          // recorded nowhere; irrelevant to the model
        } else {
          break;
        }
        ++i_;
        continue;
      }
      if (tok.kind == TokenKind::Identifier && (tok.text == "sealed" || tok.text == "non")) {
        if (tok.text == "non" && at_ahead(1, "-") && i_ + 2 < t_.size() && t_[i_ + 2].text == "sealed") {
          i_ += 3;
          continue;
        }
        if (tok.text == "sealed" && i_ + 1 < t_.size() &&
            (t_[i_ + 1].is("class") || t_[i_ + 1].is("interface") || t_[i_ + 1].is("abstract"))) {
          ++i_;
          continue;
        }
      }
      break;
    }
    return mods;
  }

  bool starts_type() const {
    if (at("class") || at("interface") || at("enum")) return true;
    if (at("@") && at_ahead(1, "interface")) return true;
    if (at_identifier() && cur().text == "record" && i_ + 1 < t_.size() &&
        t_[i_ + 1].kind == TokenKind::Identifier)
      return true;
    return false;
  }

  std::string comment_before(std::size_t first_token) const {
    std::size_t upper = first_token < t_.size() ? t_[first_token].offset : text_.size();
    std::size_t lower = first_token == 0 ? 0 : t_[first_token - 1].end();
    std::string out;
    for (const auto& c : m_.comments) {
      if (c.offset >= lower && c.offset < upper) {
        if (!out.empty()) out += "\n";
        out += c.text;
      }
    }
    return out;
  }

  std::vector<std::string> parse_type_params() {
    std::vector<std::string> names;
    if (!at("<")) return names;
    int depth = 0;
    bool expect_name = true;
    while (!end()) {
      if (at("<")) {
        ++depth;
        expect_name = depth == 1;
      } else if (at(">")) {
        if (--depth == 0) {
          ++i_;
          return names;
        }
      } else if (at(",") && depth == 1) {
        expect_name = true;
      } else if (at("&")) {
      } else if (at_identifier() && expect_name && depth == 1) {
        names.push_back(cur().text);
        expect_name = false;
      }
      ++i_;
    }
    throw Recover{"unterminated type parameter list", i_};
  }

  TypeDecl parse_type(const Modifiers& mods, const std::string& scope) {
    TypeDecl type;
    type.range.first = mods.first;
    type.annotations = mods.annotations;
    type.visibility = mods.visibility;
    type.is_abstract = mods.is_abstract;
    type.is_static = mods.is_static;
    type.is_final = mods.is_final;
    type.comment = comment_before(mods.first);

    if (at_identifier() && cur().text == "record") {
      std::size_t at_record = i_;
      ++i_;
      std::string name = identifier();
      // records are outside the supported subset: skip the whole declaration
      while (!end() && !at("{")) ++i_;
      if (!end()) i_ = match_close(i_) + 1;
      throw Recover{"record '" + name + "' skipped (unsupported)", at_record};
    }

    bool annotation_type = false;
    if (at("@")) {
      annotation_type = true;
      ++i_;
    }
    if (at("class")) {
      type.kind = TypeKind::Class;
    } else if (at("interface")) {
      type.kind = TypeKind::Interface;
    } else if (at("enum")) {
      type.kind = TypeKind::Enum;
    }
    ++i_;
    type.name_token = i_;
    type.name = identifier();
    type.qualified_name = scope.empty() ? type.name : scope + "." + type.name;
    type.type_params = parse_type_params();
    if (type.kind == TypeKind::Interface && annotation_type) type.is_abstract = true;

    while (!end() && !at("{")) {
      if (at("extends")) {
        ++i_;
        type.extends.push_back(parse_type_ref());
        while (at(",")) {
          ++i_;
          type.extends.push_back(parse_type_ref());
        }
      } else if (at("implements")) {
        ++i_;
        type.implements.push_back(parse_type_ref());
        while (at(",")) {
          ++i_;
          type.implements.push_back(parse_type_ref());
        }
      } else if (at_identifier() && cur().text == "permits") {
        ++i_;
        parse_type_ref();
        while (at(",")) {
          ++i_;
          parse_type_ref();
        }
      } else {
        throw Recover{"unexpected '" + cur().text + "' in type header", i_};
      }
    }
    type.body_open = i_;
    expect("{");

    if (type.kind == TypeKind::Enum) parse_enum_constants(type);

    while (!end() && !at("}")) {
      std::size_t start = i_;
      try {
        parse_member(type);
      } catch (const Recover& r) {
        diag(r.message, r.at);
        skip_declaration(start);
      }
    }
    if (end()) throw Recover{"unterminated body of '" + type.name + "'", type.body_open};
    type.body_close = i_;
    ++i_;
    type.range.last = i_;
    return type;
  }

  void parse_enum_constants(TypeDecl& type) {
    while (!end() && !at(";") && !at("}")) {
      std::size_t first = i_;
      Modifiers mods = parse_modifiers();
      if (!at_identifier()) throw Recover{"expected enum constant", i_};
      MemberDecl constant;
      constant.kind = MemberKind::Field;
      constant.visibility = Visibility::Public;
      constant.is_static = true;
      constant.is_final = true;
      constant.annotations = mods.annotations;
      constant.comment = comment_before(first);
      constant.name_token = i_;
      constant.name = identifier();
      constant.type.raw = type.name;
      constant.type.base = type.name;
      if (at("(")) {
        std::size_t close = match_close(i_);
        for (std::size_t k = i_ + 1; k < close; ++k) constant.body.push_back(t_[k]);
        constant.body_range = {i_ + 1, close};
        i_ = close + 1;
      }
      if (at("{")) {
        std::size_t close = match_close(i_);
        for (std::size_t k = i_ + 1; k < close; ++k) type.init_tokens.push_back(t_[k]);
        i_ = close + 1;
      }
      constant.range = {first, i_};
      type.members.push_back(std::move(constant));
      if (at(",")) ++i_;
    }
    if (at(";")) ++i_;
  }

  void parse_member(TypeDecl& type) {
    if (at(";")) {
      ++i_;
      return;
    }
    std::size_t first = i_;
    if (at("{") || (at("static") && at_ahead(1, "{"))) {
      if (at("static")) ++i_;
      std::size_t close = match_close(i_);
      for (std::size_t k = i_ + 1; k < close; ++k) type.init_tokens.push_back(t_[k]);
      i_ = close + 1;
      return;
    }
    Modifiers mods = parse_modifiers();
    if (starts_type()) {
      TypeDecl nested = parse_type(mods, type.qualified_name);
      if (type.kind == TypeKind::Interface && !mods.explicit_visibility)
        nested.visibility = Visibility::Public;
      type.nested.push_back(std::move(nested));
      return;
    }

    bool in_interface = type.kind == TypeKind::Interface;
    MemberDecl member;
    member.annotations = mods.annotations;
    member.visibility = (in_interface && !mods.explicit_visibility) ? Visibility::Public : mods.visibility;
    member.is_static = mods.is_static;
    member.is_abstract = mods.is_abstract;
    member.is_final = mods.is_final;
    member.is_default = mods.is_default;
    member.comment = comment_before(first);
    member.range.first = first;

    if (at("<")) parse_type_params();

    if (at_identifier() && cur().text == type.name && at_ahead(1, "(")) {
      member.kind = MemberKind::Constructor;
      member.name_token = i_;
      member.name = identifier();
      parse_callable_rest(member, false);
      member.range.last = i_;
      type.members.push_back(std::move(member));
      return;
    }

    TypeRef declared = parse_type_ref();
    if (!at_identifier()) throw Recover{"expected member name", i_};
    if (at_ahead(1, "(")) {
      member.kind = MemberKind::Method;
      member.type = std::move(declared);
      member.name_token = i_;
      member.name = identifier();
      parse_callable_rest(member, in_interface);
      member.range.last = i_;
      type.members.push_back(std::move(member));
      return;
    }

    // field declarators: `T a = x, b[] = y;`
    std::vector<MemberDecl> declarators;
    while (true) {
      MemberDecl field = member;
      field.kind = MemberKind::Field;
      field.type = declared;
      if (in_interface) {
        field.is_static = true;
        field.is_final = true;
      }
      field.name_token = i_;
      field.name = identifier();
      while (at("[") && at_ahead(1, "]")) {
        i_ += 2;
        field.type.array_dims += 1;
        field.type.raw += "[]";
      }
      if (at("=")) {
        ++i_;
        std::size_t init_first = i_;
        int depth = 0;
        while (!end()) {
          if (at("(") || at("[") || at("{")) {
            ++depth;
          } else if (at(")") || at("]") || at("}")) {
            if (depth == 0) break;
            --depth;
          } else if ((at(",") || at(";")) && depth == 0) {
            break;
          }
          ++i_;
        }
        for (std::size_t k = init_first; k < i_; ++k) field.body.push_back(t_[k]);
        field.body_range = {init_first, i_};
        field.has_body = true;
      }
      declarators.push_back(std::move(field));
      if (at(",")) {
        ++i_;
        continue;
      }
      expect(";");
      break;
    }
    for (auto& f : declarators) {
      f.range.last = i_;
      type.members.push_back(std::move(f));
    }
  }

  void parse_callable_rest(MemberDecl& member, bool in_interface) {
    member.params_open = i_;
    expect("(");
    while (!at(")")) {
      if (end()) throw Recover{"unterminated parameter list", member.params_open};
      Param p;
      p.tokens.first = i_;
      Modifiers pm = parse_modifiers();
      (void)pm;
      p.type = parse_type_ref();
      if (at("this")) {
        // receiver parameter
        ++i_;
        if (at(",")) ++i_;
        continue;
      }
      p.name_token = i_;
      p.name = identifier();
      while (at("[") && at_ahead(1, "]")) {
        i_ += 2;
        p.type.array_dims += 1;
        p.type.raw += "[]";
      }
      p.tokens.last = i_;
      member.params.push_back(std::move(p));
      if (at(",")) {
        ++i_;
      } else if (!at(")")) {
        throw Recover{"expected ',' or ')' in parameter list", i_};
      }
    }
    member.params_close = i_;
    ++i_;
    while (at("[") && at_ahead(1, "]")) {
      i_ += 2;
      member.type.array_dims += 1;
      member.type.raw += "[]";
    }
    if (at("throws")) {
      ++i_;
      member.throws.push_back(parse_type_ref());
      while (at(",")) {
        ++i_;
        member.throws.push_back(parse_type_ref());
      }
    }
    if (at("{")) {
      std::size_t close = match_close(i_);
      for (std::size_t k = i_ + 1; k < close; ++k) member.body.push_back(t_[k]);
      member.body_range = {i_ + 1, close};
      member.has_body = true;
      i_ = close + 1;
      return;
    }
    if (at("default")) {
      // annotation element default value
      while (!end() && !at(";")) ++i_;
    }
    expect(";");
    if (in_interface && !member.is_static && !member.is_default) member.is_abstract = true;
  }

  // ---- types --------------------------------------------------------------

  TypeRef parse_type_ref() {
    TypeRef ref;
    ref.tokens.first = i_;
    while (at("@")) parse_annotation();
    if (at("?")) {
      ++i_;
      ref.base = "?";
      ref.raw = "?";
      if (at("extends") || at("super")) {
        std::string kw = cur().text;
        ++i_;
        TypeRef bound = parse_type_ref();
        ref.raw = "? " + kw + " " + bound.raw;
        ref.args.push_back(std::move(bound));
      }
      ref.tokens.last = i_;
      return ref;
    }
    if (!end() && cur().kind == TokenKind::Keyword && is_primitive_type(cur().text)) {
      ref.base = cur().text;
      ++i_;
    } else if (at_identifier()) {
      ref.base = identifier();
      while (true) {
        if (at("<")) {
          parse_type_args(ref);
          continue;
        }
        if (at(".") && i_ + 1 < t_.size() && t_[i_ + 1].kind == TokenKind::Identifier) {
          ++i_;
          // `Outer<T>.Inner` keeps only the innermost arguments
          if (!ref.args.empty()) ref.args.clear();
          ref.base += "." + identifier();
          continue;
        }
        break;
      }
    } else {
      throw Recover{end() ? "unexpected end of input" : "expected type, found '" + cur().text + "'", i_};
    }
    while (at("[") && at_ahead(1, "]")) {
      i_ += 2;
      ++ref.array_dims;
    }
    if (at("...")) {
      ++i_;
      ref.varargs = true;
    }
    ref.raw = ref.base;
    if (!ref.args.empty() || diamond_) {
      std::vector<std::string> parts;
      for (const auto& a : ref.args) parts.push_back(a.raw);
      ref.raw += "<" + join(parts, ",") + ">";
      diamond_ = false;
    }
    for (int d = 0; d < ref.array_dims; ++d) ref.raw += "[]";
    if (ref.varargs) ref.raw += "...";
    ref.tokens.last = i_;
    return ref;
  }

  void parse_type_args(TypeRef& ref) {
    expect("<");
    ref.args.clear();
    if (at(">")) {
      ++i_;
      diamond_ = true;
      return;
    }
    while (true) {
      ref.args.push_back(parse_type_ref());
      if (at(",")) {
        ++i_;
        continue;
      }
      expect(">");
      break;
    }
  }

  std::string_view text_;
  CompilationModel& m_;
  const std::vector<Token>& t_;
  std::size_t i_ = 0;
  bool diamond_ = false;
};

}  // namespace

CompilationModel parse_source(std::string_view text, std::string unit_id) {
  CompilationModel model;
  model.unit_id = std::move(unit_id);
  LexResult lexed = lex(text);
  model.tokens = std::move(lexed.tokens);
  model.comments = std::move(lexed.comments);
  for (auto& d : lexed.diagnostics) model.diagnostics.push_back({d.message, d.line, d.column});
  model.loc = count_code_lines(model.tokens);
  Parser(text, model).parse();
  return model;
}

CompilationModel parse_unit(std::string_view text, std::string unit_id) {
  CompilationModel model = parse_source(text, std::move(unit_id));
  if (model.types.empty()) {
    std::size_t line = 1;
    std::size_t col = 1;
    if (!model.diagnostics.empty()) {
      line = model.diagnostics.front().line;
      col = model.diagnostics.front().column;
    }
    throw ParseError("no top-level type in '" + model.unit_id + "'", line, col);
  }
  return model;
}

TypeRef parse_type_text(std::string_view text) {
  // wrap in a field declaration and reuse the member parser
  std::string src = "class X { " + std::string(text) + " x; }";
  CompilationModel m = parse_source(src);
  if (m.types.empty() || m.types[0].members.empty()) {
    TypeRef ref;
    ref.raw = trim(text);
    ref.base = ref.raw;
    return ref;
  }
  TypeRef ref = m.types[0].members[0].type;
  ref.tokens = {};
  return ref;
}

}  // namespace specmine::srcmodel
