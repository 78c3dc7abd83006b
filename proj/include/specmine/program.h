#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specmine/code_model.h"
#include "specmine/resolve.h"

namespace specmine::srcmodel {

/// A source file addressed by a path relative to its subsystem or project.
struct SourceFile {
  std::string path;
  std::string text;
};

/// An occurrence of an internal type name in a unit's token stream.
struct TypeOccurrence {
  std::size_t first = 0;  // token index
  std::size_t last = 0;   // inclusive; > first for package-qualified names
  std::string qualified;
};

/// Identifier use of a member: `recv.name`, `name(...)` or a declaration.
struct MemberOccurrence {
  std::size_t token = 0;
  bool is_declaration = false;
  /// For calls: indices of '(' and ')' around the argument list.
  std::optional<std::pair<std::size_t, std::size_t>> call_parens;
};

/// Parsed and resolved set of units treated as one project. Not copyable:
/// the resolver points into the owned models.
class Program {
 public:
  explicit Program(const std::vector<SourceFile>& files);
  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;

  std::size_t size() const { return models_.size(); }
  const CompilationModel& model(std::size_t unit) const { return models_[unit]; }
  const std::string& path(std::size_t unit) const { return paths_[unit]; }
  const std::string& text(std::size_t unit) const { return texts_[unit]; }
  const Resolver& resolver() const { return resolver_; }
  const std::vector<std::set<std::size_t>>& edges() const { return edges_; }

  const TypeDecl* find_type(const std::string& qualified) const;
  std::optional<std::size_t> unit_of(const std::string& qualified) const;
  /// All internal types (qualified names) in declaration order.
  const std::vector<std::string>& type_names() const { return type_order_; }
  std::vector<std::string> types_named(const std::string& simple) const;

  /// Qualified internal supertypes of a type (direct only).
  std::vector<std::string> supertypes(const std::string& qualified) const;
  /// The type itself plus every internal supertype, transitively.
  std::set<std::string> ancestors(const std::string& qualified) const;
  /// The type itself plus every internal subtype, transitively.
  std::set<std::string> descendants(const std::string& qualified) const;

  /// Resolves a TypeRef written inside `unit` to an internal qualified name.
  std::optional<std::string> internal_type(std::size_t unit, const TypeRef& ref) const;
  std::optional<std::string> internal_type(std::size_t unit, const std::string& written) const;

  /// Member lookup through the type and its internal ancestors.
  const MemberDecl* find_member(const std::string& qualified, const std::string& name, MemberKind kind,
                                std::optional<std::size_t> arity = std::nullopt,
                                std::string* declaring = nullptr) const;

  /// Innermost type and member containing a token.
  const TypeDecl* type_at(std::size_t unit, std::size_t token) const;
  const MemberDecl* member_at(std::size_t unit, std::size_t token) const;

  std::vector<TypeOccurrence> type_occurrences(std::size_t unit) const;

  /// Internal type of the expression ending just before token `dot` (which
  /// must be a '.'), as far as declarations allow it to be determined.
  std::optional<std::string> receiver_type(std::size_t unit, std::size_t dot) const;

  /// Declared type of a variable visible at `token` (locals, params, fields)
  /// together with the unit the declaration was written in.
  std::optional<std::pair<std::size_t, TypeRef>> variable_type(std::size_t unit, std::size_t token,
                                                               const std::string& name) const;
  /// True when `name` is a local variable or parameter in scope at `token`.
  bool is_local(std::size_t unit, std::size_t token, const std::string& name) const;

  /// Uses of member `name` of `qualified` (or any type in its hierarchy for
  /// methods) throughout the program, including declarations.
  std::vector<std::pair<std::size_t, MemberOccurrence>> member_occurrences(const std::string& qualified,
                                                                           const std::string& name,
                                                                           MemberKind kind,
                                                                           std::optional<std::size_t> arity) const;

 private:
  struct Owner {
    const TypeDecl* type = nullptr;
    const MemberDecl* member = nullptr;
  };

  std::vector<std::string> paths_;
  std::vector<std::string> texts_;
  std::vector<CompilationModel> models_;
  Resolver resolver_;
  std::vector<std::set<std::size_t>> edges_;
  std::map<std::string, std::pair<std::size_t, const TypeDecl*>> types_;
  std::vector<std::string> type_order_;
  std::vector<std::vector<Owner>> owners_;
};

/// Splits the argument list between '(' at `open` and ')' at `close` into
/// top-level comma separated token ranges [first, last).
std::vector<std::pair<std::size_t, std::size_t>> split_arguments(const std::vector<Token>& tokens, std::size_t open,
                                                                 std::size_t close);

/// Index of the bracket matching the one at `at` ('(' '[' '{' forward,
/// ')' ']' '}' backward); npos when unbalanced.
std::size_t matching_bracket(const std::vector<Token>& tokens, std::size_t at);

}  // namespace specmine::srcmodel
