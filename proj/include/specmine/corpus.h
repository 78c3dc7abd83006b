#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "specmine/code_model.h"

namespace specmine::corpus {

enum class Granularity { Project, Unit };

/// Word -> occurrence count. Ordered so that serialisations are stable.
using TermCounts = std::map<std::string, int>;

struct SourceUnit {
  std::string unit_id;  // "<project>/<relative path>"
  std::string project_id;
  std::string relative_path;
  std::string text;
  std::size_t loc = 0;
  std::string package_name;
  std::vector<std::string> declared_type_names;
  TermCounts token_index;
};

struct CorpusProject {
  std::string project_id;
  std::filesystem::path root;
  std::vector<std::size_t> units;
  TermCounts doc_tokens;
};

/// The developer's three keyword sets.
struct KeywordSpec {
  std::vector<std::string> project_keywords;
  std::vector<std::string> file_keywords;
  std::vector<std::string> key_terms;

  /// Builds the spec from a single keyword list where a leading '@' marks a
  /// project-scope keyword, plus the key-term list (leading '@' stripped).
  static KeywordSpec from_lists(const std::vector<std::string>& keywords,
                                const std::vector<std::string>& key_terms);
};

struct Posting {
  std::size_t unit = 0;
  int tf = 0;
};

/// Immutable indexed snapshot of a corpus directory.
class CorpusIndex {
 public:
  CorpusIndex() = default;
  CorpusIndex(std::filesystem::path root, std::vector<CorpusProject> projects, std::vector<SourceUnit> units,
              std::vector<srcmodel::CompilationModel> models, std::vector<std::string> diagnostics);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<CorpusProject>& projects() const { return projects_; }
  const std::vector<SourceUnit>& units() const { return units_; }
  /// Parsed model for units()[i].
  const std::vector<srcmodel::CompilationModel>& models() const { return models_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  const std::vector<Posting>& postings(const std::string& word) const;
  std::size_t df(const std::string& word, Granularity g) const;
  std::size_t doc_count(Granularity g) const;

  const SourceUnit* find_unit(const std::string& unit_id) const;
  std::size_t unit_index(const std::string& unit_id) const;
  const CorpusProject* find_project(const std::string& project_id) const;
  const std::map<std::string, std::vector<Posting>>& inverted_index() const { return inverted_; }

 private:
  std::filesystem::path root_;
  std::vector<CorpusProject> projects_;
  std::vector<SourceUnit> units_;
  std::vector<srcmodel::CompilationModel> models_;
  std::vector<std::string> diagnostics_;
  std::map<std::string, std::vector<Posting>> inverted_;
  std::map<std::string, std::size_t> project_df_;
  std::map<std::string, std::size_t> unit_lookup_;
};

/// Word tokens of a unit: identifier words (split and lowercased), plus the
/// words of comments and string literals. Java keywords are not indexed.
TermCounts tokenize_unit(const srcmodel::CompilationModel& model);

/// Indexes every immediate subdirectory of `root` as one project.
CorpusIndex index_corpus(const std::filesystem::path& root);

/// tf x ln((N+1)/(df+1)) with raw tf and N documents at the granularity.
double tf_idf(const std::string& word, const TermCounts& document, const CorpusIndex& index, Granularity g);

std::vector<std::string> search_projects(const CorpusIndex& index, const std::vector<std::string>& keywords);

std::vector<std::string> all_project_ids(const CorpusIndex& index);

std::vector<std::string> search_files(const CorpusIndex& index, const std::vector<std::string>& keywords,
                                      const std::vector<std::string>& scope, std::size_t max_results = 500);

/// Persists the index under `dir` (manifest.json + postings.json).
void save_index(const CorpusIndex& index, const std::filesystem::path& dir);

/// Loads an index saved by save_index; unit text is re-read from the corpus
/// root recorded in the manifest and checked against the stored hash.
CorpusIndex load_index(const std::filesystem::path& dir);

}  // namespace specmine::corpus
