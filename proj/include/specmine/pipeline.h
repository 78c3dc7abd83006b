#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specmine/corpus.h"
#include "specmine/extract.h"
#include "specmine/match.h"

namespace specmine::pipeline {

namespace fs = std::filesystem;

struct PipelineConfig {
  fs::path corpus;
  fs::path workspace;
  fs::path library_mapping;  // empty: no mapping
  /// Single keyword list; a leading '@' marks project scope.
  std::vector<std::string> keywords;
  std::vector<std::string> key_terms;

  extract::Limits limits;
  extract::FilterConfig filter;
  std::size_t max_seeds = 500;
  double merge_threshold = 0.6;
  double class_merge_threshold = 0.5;
  double match_threshold = 0.5;
  double class_match_threshold = 0.5;
  std::size_t suggested_terms = 6;
  match::NamingConventions naming;
  bool remove_unused = false;

  corpus::KeywordSpec keyword_spec() const;
  /// Settings that influence outputs, as canonical JSON (paths excluded).
  std::string canonical() const;
};

/// Reads a JSON config. Relative paths are taken from the config's
/// directory. Throws ConfigError.
PipelineConfig load_config(const fs::path& file);
PipelineConfig parse_config(const std::string& text, const fs::path& base_dir);
void validate(const PipelineConfig& config);

enum class Stage { Index, Search, Extract, Abstract, Render, Match, Harvest, Assemble, Pipeline };

std::string to_string(Stage stage);
std::optional<Stage> parse_stage(const std::string& name);

struct StageArtifact {
  std::string stage;
  std::string input_hash;
  bool cached = false;
  /// Nothing to pass on to the next stage.
  bool empty = false;
  std::vector<std::string> outputs;  // relative to the workspace
  std::vector<std::string> diagnostics;
  std::string summary;
};

struct RunOptions {
  /// Abstraction id for match/harvest/assemble; empty selects all.
  std::string abstraction;
};

/// Runs one stage (or all of them for Stage::Pipeline, stopping after the
/// first empty result). Throws MissingPrerequisite when an earlier stage's
/// output is absent.
std::vector<StageArtifact> run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options = {});

/// Process exit code for a completed run: 0, or 1 when a stage came up empty.
int exit_code(const std::vector<StageArtifact>& artifacts);

/// Workspace-relative locations.
struct AbstractionEntry {
  std::string id;
  std::string interface_name;
  fs::path file;  // editable abstraction file
  fs::path uml;
  std::vector<std::string> merged_from;
};

std::vector<AbstractionEntry> list_abstractions(const fs::path& workspace);

}  // namespace specmine::pipeline
