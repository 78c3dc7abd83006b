#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specmine/code_model.h"
#include "specmine/corpus.h"
#include "specmine/extract.h"

namespace specmine::abstraction {

using srcmodel::MemberKind;

/// Compatibility class of a type.
enum class TypeGroup { Integral, Floating, Boolean, Char, Text, Void, Container, Internal, External };

struct TypeAbs {
  TypeGroup group = TypeGroup::External;
  /// Internal: class name; External: simple name; otherwise empty.
  std::string name;
  /// Container element, when group == Container.
  std::vector<TypeAbs> element;

  bool operator==(const TypeAbs&) const = default;
};

/// Classifies a raw type string; `internal` holds the class names of the
/// abstraction the type was written in.
TypeAbs classify(const std::string& raw, const std::set<std::string>& internal);
std::string to_string(const TypeAbs& t);

struct ParamAbs {
  std::string name;
  std::string type;

  bool operator==(const ParamAbs&) const = default;
};

/// A field, method or constructor abstraction. `alt_names` collects the
/// names of members merged into this one.
struct MemberAbs {
  MemberKind kind = MemberKind::Method;
  std::string name;
  std::vector<std::string> alt_names;
  std::string visibility = "public";  // public | protected | private | "" (package)
  bool is_static = false;
  std::string type;  // field type or return type; empty for constructors
  std::vector<ParamAbs> params;

  std::vector<std::string> names() const;
  bool operator==(const MemberAbs&) const = default;
};

struct ClassAbs {
  std::string name;
  bool is_interface = false;
  std::vector<std::string> extends;
  std::vector<std::string> implements;
  std::vector<MemberAbs> members;
  std::vector<std::string> uses;
  /// Provenance: "<subsystem id>:<qualified class name>".
  std::vector<std::string> sources;
  /// Enclosing class name when the source class was nested.
  std::string outer;

  const MemberAbs* find(MemberKind kind, const std::string& name, std::optional<std::size_t> arity = {}) const;
  bool operator==(const ClassAbs&) const = default;
};

struct SubsystemAbs {
  std::string package_name;
  std::string interface_name;
  std::vector<ClassAbs> classes;
  std::vector<std::string> sources;
  std::vector<std::string> libraries;
  std::string search;
  std::vector<std::string> keywords;
  std::vector<std::string> keyterms;
  std::vector<std::string> suggested_terms;
  std::vector<std::string> merged_from;
  /// Package annotations this module does not interpret, kept verbatim.
  std::vector<std::string> extra_annotations;

  // metadata, not part of the rendered value
  std::string id;
  double relevancy = 0.0;

  const ClassAbs* find_class(const std::string& name) const;
  std::set<std::string> class_names() const;
  /// Structural equality on the rendered content (ignores id, relevancy).
  bool same_structure(const SubsystemAbs& other) const;
};

/// Evaluation context for type compatibility: `left` owns the first type,
/// `right` the second. Internal class pairs are compared by member
/// signatures one level deep and memoized.
class TypeContext {
 public:
  TypeContext(const SubsystemAbs& left, const SubsystemAbs& right);

  bool compatible(const std::string& a, const std::string& b, int depth = 0);
  bool compatible(const TypeAbs& a, const TypeAbs& b, int depth = 0);
  bool signature_compatible(const MemberAbs& a, const MemberAbs& b, int depth = 0);
  TypeContext swapped() const;

  const SubsystemAbs& left() const { return *left_; }
  const SubsystemAbs& right() const { return *right_; }

 private:
  double class_similarity(const std::string& a, const std::string& b, int depth);

  const SubsystemAbs* left_;
  const SubsystemAbs* right_;
  std::set<std::string> left_names_;
  std::set<std::string> right_names_;
  std::map<std::pair<std::string, std::string>, bool> memo_;
};

/// Standalone check of two TypeRefs; `internal` lists names of declared
/// internal types shared by both sides.
bool types_compatible(const std::string& a, const std::string& b, const std::set<std::string>& internal = {});

/// Jaccard similarity of split_identifier word sets.
double name_similarity(const std::string& a, const std::string& b);
/// Maximum name similarity over the merged name sets.
double member_name_similarity(const MemberAbs& a, const MemberAbs& b);

/// Relevant members: visible, key-term bearing, or private fields exposed
/// through a public getter and setter.
ClassAbs abstract_class(const srcmodel::TypeDecl& type, const std::vector<std::string>& key_terms);

struct ClassMerge {
  ClassAbs merged;
  double score = 0.0;
  /// Matched member index pairs (a, b).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

ClassMerge merge_class_abs(const ClassAbs& a, const ClassAbs& b, TypeContext& ctx);
ClassMerge merge_class_abs(const ClassAbs& a, const ClassAbs& b);

/// Class selection: non-trivial, non-private, non-test classes; minus
/// subtypes of selected classes; plus classes their members refer to.
SubsystemAbs abstract_subsystem(const extract::Subsystem& subsystem, const std::vector<std::string>& key_terms);

struct SubsystemMerge {
  double score = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> class_pairs;
  std::vector<double> class_scores;
  /// Present iff score >= threshold.
  std::optional<SubsystemAbs> merged;
};

SubsystemMerge merge_subsystem_abs(const SubsystemAbs& a, const SubsystemAbs& b, double threshold = 0.6,
                                   double class_threshold = 0.5);

/// Presentation order: merged count, relevancy, id (ascending) as final key.
bool presentation_before(const SubsystemAbs& a, const SubsystemAbs& b);

/// Greedy agglomeration over descending pair scores.
std::vector<SubsystemAbs> merge_all(std::vector<SubsystemAbs> abstractions, double threshold = 0.6,
                                    double class_threshold = 0.5);

/// Top-k identifier words of the source classes by summed unit tf-idf.
std::vector<std::string> suggested_terms(const SubsystemAbs& abs, const std::vector<extract::Subsystem>& subsystems,
                                         const corpus::CorpusIndex& index, std::size_t k = 6);

std::string render_interface(const SubsystemAbs& abs);
SubsystemAbs parse_abstraction(const std::string& text);
std::string render_uml(const SubsystemAbs& abs);

/// Compilable stand-in code for an abstraction: one unit per class with
/// stub bodies.
std::vector<srcmodel::SourceFile> render_stub_code(const SubsystemAbs& abs);

}  // namespace specmine::abstraction
