#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specmine/java_lexer.h"

namespace specmine::srcmodel {

enum class Visibility { Public, Protected, Package, Private };
enum class TypeKind { Class, Interface, Enum };
enum class MemberKind { Field, Method, Constructor };

std::string to_string(Visibility v);
std::string to_string(TypeKind k);
std::string to_string(MemberKind k);

/// How a type reference was resolved. Recorded explicitly; never guessed.
enum class ResolutionKind { Pending, Internal, External, Primitive, Unresolved };

struct Resolution {
  ResolutionKind kind = ResolutionKind::Pending;
  /// Internal: qualified name of the declaring TypeDecl. External: qualified
  /// (or simple, if nothing better is known) name. Primitive: the keyword.
  std::string target;
};

/// Half-open token index range into the owning unit's token vector.
struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;
  bool empty() const { return first >= last; }
  std::size_t size() const { return last > first ? last - first : 0; }
};

struct TypeRef {
  /// Whitespace-free rendering, e.g. "Map<String,List<Integer>>" or "int[]".
  std::string raw;
  /// The named type without arguments or dimensions, as written ("java.util.List").
  std::string base;
  std::vector<TypeRef> args;
  int array_dims = 0;
  bool varargs = false;
  TokenRange tokens;
  Resolution resolution;

  std::string simple_name() const;
  bool is_void() const { return raw == "void"; }
};

/// Element type for arrays and single-argument collections; nullptr otherwise.
const TypeRef* element_type(const TypeRef& ref, TypeRef& scratch);
bool is_container_name(const std::string& simple_name);

struct Annotation {
  std::string name;
  bool has_args = false;
  /// Source text between the parentheses.
  std::string args_text;
  TokenRange tokens;
};

struct Param {
  std::string name;
  TypeRef type;
  TokenRange tokens;
  std::size_t name_token = 0;
};

struct MemberDecl {
  MemberKind kind = MemberKind::Field;
  std::string name;
  Visibility visibility = Visibility::Package;
  bool is_static = false;
  bool is_abstract = false;
  bool is_final = false;
  bool is_default = false;
  /// Field type or return type; empty raw for constructors.
  TypeRef type;
  std::vector<Param> params;
  std::vector<TypeRef> throws;
  bool has_body = false;
  /// Method/constructor body (without the outer braces) or field initializer.
  std::vector<Token> body;
  TokenRange body_range;
  std::string comment;
  std::vector<Annotation> annotations;
  /// Whole declaration including leading annotations and modifiers.
  TokenRange range;
  std::size_t name_token = 0;
  /// Index of '(' and ')' around the parameter list (methods/constructors).
  std::size_t params_open = 0;
  std::size_t params_close = 0;

  bool has_annotation(const std::string& simple) const;
};

struct TypeDecl {
  std::string name;
  std::string qualified_name;
  TypeKind kind = TypeKind::Class;
  Visibility visibility = Visibility::Package;
  bool is_abstract = false;
  bool is_static = false;
  bool is_final = false;
  std::vector<TypeRef> extends;
  std::vector<TypeRef> implements;
  std::vector<std::string> type_params;
  std::vector<MemberDecl> members;
  std::vector<TypeDecl> nested;
  std::vector<Annotation> annotations;
  std::string comment;
  /// Tokens of initializer blocks and enum constant arguments.
  std::vector<Token> init_tokens;
  TokenRange range;
  std::size_t name_token = 0;
  std::size_t body_open = 0;
  std::size_t body_close = 0;

  std::vector<const TypeRef*> super_types() const;
};

struct ImportDecl {
  std::string name;
  bool is_static = false;
  bool is_wildcard = false;
  TokenRange tokens;

  /// Package part: "a.b.C" -> "a.b", "a.b.*" -> "a.b".
  std::string package() const;
  std::string simple_name() const;
};

struct Diagnostic {
  std::string message;
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Parsed representation of one source unit.
struct CompilationModel {
  std::string unit_id;
  std::string package_name;
  TokenRange package_tokens;
  std::vector<Annotation> package_annotations;
  std::vector<ImportDecl> imports;
  std::vector<TypeDecl> types;
  std::vector<Token> tokens;
  std::vector<Comment> comments;
  std::vector<Diagnostic> diagnostics;
  std::size_t loc = 0;
};

/// Visits every declared type (top-level and nested), depth first.
template <typename Fn>
void for_each_type(const std::vector<TypeDecl>& types, Fn&& fn) {
  for (const auto& t : types) {
    fn(t);
    for_each_type(t.nested, fn);
  }
}

template <typename Fn>
void for_each_type(std::vector<TypeDecl>& types, Fn&& fn) {
  for (auto& t : types) {
    fn(t);
    for_each_type(t.nested, fn);
  }
}

/// Applies `fn` to every TypeRef in a declaration tree (supertypes, member
/// types, parameter types, throws clauses).
template <typename Fn>
void for_each_type_ref(TypeDecl& type, Fn&& fn) {
  for (auto& r : type.extends) fn(r);
  for (auto& r : type.implements) fn(r);
  for (auto& m : type.members) {
    if (!m.type.raw.empty()) fn(m.type);
    for (auto& p : m.params) fn(p.type);
    for (auto& r : m.throws) fn(r);
  }
  for (auto& n : type.nested) for_each_type_ref(n, fn);
}

}  // namespace specmine::srcmodel
