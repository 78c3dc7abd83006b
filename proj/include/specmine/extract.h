#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specmine/corpus.h"
#include "specmine/program.h"
#include "specmine/resolve.h"

namespace specmine::extract {

struct Limits {
  std::size_t hard_cap = 200;
};

struct FilterConfig {
  std::size_t min_loc = 200;
  std::size_t min_types = 3;
  std::size_t max_loc = 12000;
  std::size_t max_units = 60;
  double max_test_fraction = 0.5;
  double min_relevancy = 5.0;
};

struct LibraryCoord {
  std::string group;
  std::string artifact;
  std::string version;
  std::string prefix;

  /// "group:artifact:version"
  std::string coordinate() const;
  bool operator==(const LibraryCoord&) const = default;
};

/// Offline stand-in for a repository search: package prefix -> coordinate.
class LibraryMapping {
 public:
  LibraryMapping() = default;
  explicit LibraryMapping(std::vector<LibraryCoord> entries);
  /// JSON array of {prefix, group, artifact, version} records.
  static LibraryMapping load(const std::filesystem::path& file);

  /// Longest-prefix match on package-name components.
  std::optional<LibraryCoord> lookup(const std::string& qualified) const;
  const std::vector<LibraryCoord>& entries() const { return entries_; }

 private:
  std::vector<LibraryCoord> entries_;
};

struct SubsystemUnit {
  std::string path;    // relative to the subsystem root
  std::string origin;  // unit id in the corpus
  std::string text;
  std::size_t loc = 0;
};

struct Subsystem {
  std::string id;
  std::string project_id;
  std::string seed_unit;
  std::string package_name;
  std::vector<SubsystemUnit> units;
  std::size_t total_loc = 0;
  std::size_t type_count = 0;
  std::vector<LibraryCoord> libraries;
  double relevancy = 0.0;
  /// Packages of the original units, before flattening.
  std::vector<std::string> original_packages;
  /// Original qualified top-level name -> simple name after flattening.
  std::map<std::string, std::string> renamed;
  std::vector<std::string> diagnostics;

  std::vector<srcmodel::SourceFile> files() const;
  std::set<std::string> origin_set() const;
};

/// Worklist closure over reference edges, first inside the seed's package,
/// then across the rest of its project. Throws TooLarge past the cap.
Subsystem expand_to_subsystem(std::size_t seed_unit, const srcmodel::ResolvedModel& model,
                              const corpus::CorpusIndex& index, const Limits& limits = {});

/// Moves every unit into `target_package`, dropping intra-subsystem imports
/// and renaming colliding top-level names to Name2, Name3, ...
Subsystem flatten_packages(const Subsystem& subsystem, const std::string& target_package);

/// References to types of the original project that do not resolve inside
/// the flattened subsystem. Empty when the closure invariant holds.
std::vector<std::string> unresolved_internal_references(const Subsystem& flattened,
                                                        const std::set<std::string>& project_type_names);

/// 2 x key-term hits among declaration-name words + 1 x hits among the
/// other identifier, comment and string-literal words.
double score_relevancy(const Subsystem& subsystem, const std::vector<std::string>& key_terms);

/// Unit carries a @Test method or imports org.junit.
bool is_test_unit(const srcmodel::CompilationModel& model);

struct Rejection {
  std::string subsystem_id;
  std::string reason;  // trivial | complex | tests | relevancy | duplicate
};

struct FilterResult {
  std::vector<Subsystem> kept;
  std::vector<Rejection> rejected;
};

FilterResult filter_subsystems(std::vector<Subsystem> subsystems, const FilterConfig& config);

struct LibraryResult {
  std::vector<LibraryCoord> libraries;
  std::vector<std::string> diagnostics;
};

LibraryResult identify_libraries(const Subsystem& subsystem, const LibraryMapping& mapping);

struct ExtractOptions {
  Limits limits;
  FilterConfig filter;
  std::vector<std::string> key_terms;
};

struct ExtractResult {
  std::vector<Subsystem> kept;
  std::vector<Rejection> rejected;
  std::vector<std::string> diagnostics;
  std::size_t candidates = 0;
};

/// Expand, flatten, score and filter every seed (seed order is kept).
ExtractResult extract_subsystems(const corpus::CorpusIndex& index, const srcmodel::ResolvedModel& model,
                                 const std::vector<std::string>& seed_units, const ExtractOptions& options,
                                 const LibraryMapping& mapping);

void save_subsystem(const Subsystem& subsystem, const std::filesystem::path& dir);
Subsystem load_subsystem(const std::filesystem::path& dir);

}  // namespace specmine::extract
