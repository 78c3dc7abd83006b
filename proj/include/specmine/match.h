#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specmine/abstraction.h"
#include "specmine/extract.h"
#include "specmine/matching.h"

namespace specmine::match {

using abstraction::MemberAbs;
using abstraction::name_similarity;
using srcmodel::MemberKind;

/// Every member of a retrieved class, relevant or not.
struct RetrievedClass {
  std::string qualified;
  std::string name;
  std::string outer;
  bool is_interface = false;
  std::vector<MemberAbs> members;
};

struct ClassPair {
  std::string retrieved;  // qualified name in the retrieved subsystem
  std::string abs_class;
  double score = 0.0;
  double member_score = 0.0;
  double word_score = 0.0;
};

struct MemberPair {
  std::string abs_class;
  std::size_t abs_member = 0;  // index into the ClassAbs members
  std::string retrieved_class;
  MemberAbs retrieved;
  /// Abstraction parameter i takes retrieved parameter permutation[i].
  std::vector<std::size_t> permutation;
  double weight = 0.0;
};

struct MatchMapping {
  std::string subsystem_id;
  abstraction::SubsystemAbs edited;
  abstraction::SubsystemAbs retrieved_abs;
  std::vector<RetrievedClass> retrieved_classes;
  /// Retrieved qualified class -> abstraction class name.
  std::map<std::string, std::string> type_map;
  std::vector<ClassPair> class_pairs;
  std::vector<MemberPair> member_pairs;
  double score = 0.0;
  std::vector<std::string> word_evidence;

  const RetrievedClass* find_retrieved(const std::string& qualified) const;
};

struct MatchOptions {
  double threshold = 0.5;
  double class_threshold = 0.5;
  double signature_weight = 0.7;
  double word_weight = 0.3;
  std::vector<std::string> key_terms;
};

/// Abstracts `retrieved` and matches it against the edited abstraction.
/// Throws NoViableMatch below the threshold.
MatchMapping match_subsystem(const abstraction::SubsystemAbs& edited, const extract::Subsystem& retrieved,
                             const MatchOptions& options = {});

/// Parameter permutation maximising type agreement, then name agreement.
std::vector<std::size_t> parameter_permutation(const MemberAbs& target, const MemberAbs& source,
                                               abstraction::TypeContext& ctx);

struct NamingConventions {
  bool enabled = true;
};

enum class OpKind {
  SetPackage,
  RenameType,
  MoveClass,
  RenameMember,
  ChangeType,
  ReorderParams,
  AddStub,
  RemoveUnused,
  ApplyNamingConventions
};

std::string to_string(OpKind kind);

struct TransformOp {
  OpKind kind = OpKind::SetPackage;
  /// Type addressed (simple name, or qualified when it contains a dot).
  std::string type;
  std::string member;
  MemberKind member_kind = MemberKind::Method;
  std::optional<std::size_t> arity;
  /// New package, type name, member name, type text or outer class.
  std::string value;
  /// ChangeType on a parameter: index in the current parameter list.
  std::optional<std::size_t> param;
  std::vector<std::size_t> permutation;
  /// AddStub: the member to add, or the class when `stub_class` is set.
  MemberAbs stub;
  std::optional<abstraction::ClassAbs> stub_class;

  std::string describe() const;
};

struct TransformPlan {
  std::string subsystem_id;
  abstraction::SubsystemAbs target;
  std::vector<TransformOp> ops;

  std::size_t count(OpKind kind) const;
  std::string describe() const;
};

TransformPlan plan_transforms(const MatchMapping& mapping, const NamingConventions& conventions = {},
                              bool remove_unused = false);

/// Applies the plan op by op, re-reading the code after each step. Throws
/// TransformConflict when an op cannot be applied cleanly.
extract::Subsystem apply_transforms(const extract::Subsystem& retrieved, const TransformPlan& plan);

/// Body text of generated stubs.
std::string stub_body(const std::string& member);
/// Members of `sub` whose body is a generated stub, as "Class.member".
std::vector<std::string> stubbed_members(const extract::Subsystem& sub);

/// Differences between the abstraction and the code on every element the
/// abstraction names, re-abstracting each class with `key_terms`.
std::vector<std::string> signature_mismatches(const extract::Subsystem& code, const abstraction::SubsystemAbs& target,
                                              const std::vector<std::string>& key_terms);

}  // namespace specmine::match
