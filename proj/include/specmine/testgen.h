#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "specmine/abstraction.h"
#include "specmine/corpus.h"
#include "specmine/extract.h"
#include "specmine/match.h"

namespace specmine::testgen {

using srcmodel::MemberKind;

/// A use of a member of an internal type: `recv.name(args)`, `new T(args)`
/// or `recv.field`.
struct MemberRef {
  std::string type;  // simple name in the target package
  MemberKind kind = MemberKind::Method;
  std::string name;
  std::size_t arity = 0;
  /// Per argument: "string", "char", "number", "boolean", "null" or "" when
  /// the argument is not a single literal.
  std::vector<std::string> literal_args;

  std::string describe() const;
  bool operator==(const MemberRef&) const = default;
};

struct Helper {
  std::string name;
  std::string text;
  bool lifecycle = false;
};

struct TestMethod {
  std::string subsystem_id;
  std::string project;
  std::string unit;
  std::string test_class;
  std::string name;
  /// Method declaration as rewritten, annotations included.
  std::string text;
  std::vector<Helper> helpers;
  std::vector<std::string> imports;
  std::vector<MemberRef> refs;
  /// Internal types used, excluding the ones the test unit declares.
  std::vector<std::string> types;
  /// Project types the test needs that the subsystem does not provide.
  std::vector<std::string> foreign;
  std::string hash;
};

std::vector<corpus::SourceUnit> find_test_units(const corpus::CorpusIndex& index,
                                                const extract::Subsystem& retrieved);

struct TransformResult {
  std::vector<TestMethod> tests;
  std::vector<std::string> diagnostics;
};

/// Rewrites each test unit together with the original code of `retrieved`
/// (a flattened subsystem) under `plan` and splits it into test methods.
TransformResult transform_tests(const std::vector<corpus::SourceUnit>& units, const extract::Subsystem& retrieved,
                                const corpus::CorpusIndex& index, const match::TransformPlan& plan);

/// Why `test` cannot run against the abstraction; empty when it can.
std::vector<std::string> reference_problems(const TestMethod& test, const abstraction::SubsystemAbs& abs);

std::vector<TestMethod> prune_tests(const std::vector<TestMethod>& tests, const abstraction::SubsystemAbs& abs);

/// Hash of the normalized token stream of a method plus its helpers. Names
/// in `renamed` are replaced by v1..vn in order of first occurrence; callers drop
/// the test name token beforehand.
std::string normalized_hash(const std::vector<std::vector<srcmodel::Token>>& parts,
                            const std::set<std::string>& renamed);

struct TestSuite {
  std::string package_name;
  std::string class_name;
  std::vector<TestMethod> tests;
  /// Subsystem id -> tests kept from it.
  std::map<std::string, std::size_t> provenance;
  /// Subsystem id -> tests offered (after pruning).
  std::map<std::string, std::size_t> offered;
  std::vector<std::string> imports;

  std::string render() const;
  std::string manifest() const;
};

/// Per-subsystem lists in provenance order; later duplicates are dropped.
TestSuite dedup_and_assemble(const std::vector<std::vector<TestMethod>>& per_subsystem,
                             const abstraction::SubsystemAbs& abs);

}  // namespace specmine::testgen
