#include "specmine/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "specmine/error.h"
#include "specmine/java_parser.h"
#include "specmine/text.h"

namespace specmine::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kIndexFormatVersion = 1;

void add_words(TermCounts& counts, const std::vector<std::string>& words) {
  for (const auto& w : words) ++counts[w];
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string normalize_keyword(const std::string& k) {
  std::string s = k;
  if (!s.empty() && s.front() == '@') s.erase(0, 1);
  return to_lower(trim(s));
}

std::vector<std::string> keyword_words(const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  for (const auto& k : keywords) {
    for (auto& w : split_identifier(k)) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

KeywordSpec KeywordSpec::from_lists(const std::vector<std::string>& keywords,
                                    const std::vector<std::string>& key_terms) {
  KeywordSpec spec;
  for (const auto& k : keywords) {
    std::string t = trim(k);
    if (t.empty()) continue;
    if (t.front() == '@') {
      spec.project_keywords.push_back(normalize_keyword(t));
    } else {
      spec.file_keywords.push_back(normalize_keyword(t));
    }
  }
  for (const auto& k : key_terms) {
    std::string t = normalize_keyword(k);
    if (!t.empty() && t != "...") spec.key_terms.push_back(t);
  }
  return spec;
}

CorpusIndex::CorpusIndex(fs::path root, std::vector<CorpusProject> projects, std::vector<SourceUnit> units,
                         std::vector<srcmodel::CompilationModel> models, std::vector<std::string> diagnostics)
    : root_(std::move(root)),
      projects_(std::move(projects)),
      units_(std::move(units)),
      models_(std::move(models)),
      diagnostics_(std::move(diagnostics)) {
  for (std::size_t u = 0; u < units_.size(); ++u) {
    unit_lookup_[units_[u].unit_id] = u;
    for (const auto& [word, tf] : units_[u].token_index) inverted_[word].push_back({u, tf});
  }
  for (const auto& p : projects_) {
    for (const auto& [word, tf] : p.doc_tokens) ++project_df_[word];
  }
}

const std::vector<Posting>& CorpusIndex::postings(const std::string& word) const {
  static const std::vector<Posting> empty;
  auto it = inverted_.find(word);
  return it == inverted_.end() ? empty : it->second;
}

std::size_t CorpusIndex::df(const std::string& word, Granularity g) const {
  if (g == Granularity::Unit) return postings(word).size();
  auto it = project_df_.find(word);
  return it == project_df_.end() ? 0 : it->second;
}

std::size_t CorpusIndex::doc_count(Granularity g) const {
  return g == Granularity::Unit ? units_.size() : projects_.size();
}

const SourceUnit* CorpusIndex::find_unit(const std::string& unit_id) const {
  auto it = unit_lookup_.find(unit_id);
  return it == unit_lookup_.end() ? nullptr : &units_[it->second];
}

std::size_t CorpusIndex::unit_index(const std::string& unit_id) const {
  auto it = unit_lookup_.find(unit_id);
  if (it == unit_lookup_.end()) throw Error("unknown unit '" + unit_id + "'");
  return it->second;
}

const CorpusProject* CorpusIndex::find_project(const std::string& project_id) const {
  for (const auto& p : projects_)
    if (p.project_id == project_id) return &p;
  return nullptr;
}

TermCounts tokenize_unit(const srcmodel::CompilationModel& model) {
  using srcmodel::TokenKind;
  TermCounts counts;
  for (const auto& t : model.tokens) {
    if (t.kind == TokenKind::Identifier) {
      add_words(counts, split_identifier(t.text));
    } else if (t.kind == TokenKind::StringLiteral) {
      add_words(counts, split_words(t.text));
    }
  }
  for (const auto& c : model.comments) add_words(counts, split_words(c.text));
  return counts;
}

namespace {

CorpusIndex assemble(const fs::path& root, std::vector<std::pair<std::string, std::vector<std::string>>> layout,
                     const std::map<std::string, std::string>* expected_hashes) {
  std::vector<std::string> diagnostics;
  std::vector<CorpusProject> projects;
  std::vector<SourceUnit> units;
  std::vector<srcmodel::CompilationModel> models;

  for (auto& [project_id, rel_paths] : layout) {
    CorpusProject project;
    project.project_id = project_id;
    project.root = root / project_id;
    for (const auto& rel : rel_paths) {
      std::string unit_id = project_id + "/" + rel;
      std::string text;
      try {
        text = read_file(project.root / rel);
      } catch (const IoError& e) {
        diagnostics.push_back(std::string("IoError: ") + e.what());
        continue;
      }
      if (expected_hashes) {
        auto it = expected_hashes->find(unit_id);
        if (it != expected_hashes->end() && it->second != hex64(fnv1a(text)))
          diagnostics.push_back("changed since indexing: " + unit_id);
      }
      srcmodel::CompilationModel model;
      try {
        model = srcmodel::parse_unit(text, unit_id);
      } catch (const ParseError& e) {
        diagnostics.push_back("ParseError: " + std::string(e.what()) + " at " + std::to_string(e.line()) + ":" +
                              std::to_string(e.column()));
        continue;
      }
      for (const auto& d : model.diagnostics)
        diagnostics.push_back(unit_id + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
                              d.message);
      SourceUnit unit;
      unit.unit_id = unit_id;
      unit.project_id = project_id;
      unit.relative_path = rel;
      unit.loc = model.loc;
      unit.package_name = model.package_name;
      srcmodel::for_each_type(model.types,
                              [&](const srcmodel::TypeDecl& t) { unit.declared_type_names.push_back(t.name); });
      unit.token_index = tokenize_unit(model);
      unit.text = std::move(text);

      for (const auto& [w, c] : unit.token_index) project.doc_tokens[w] += c;
      for (const auto& part : fs::path(rel)) {
        std::string name = part.string();
        if (part.has_extension()) name = part.stem().string();
        add_words(project.doc_tokens, split_identifier(name));
      }
      project.units.push_back(units.size());
      units.push_back(std::move(unit));
      models.push_back(std::move(model));
    }
    if (project.units.empty()) {
      diagnostics.push_back("project '" + project_id + "' has no parseable units; skipped");
      continue;
    }
    add_words(project.doc_tokens, split_identifier(project_id));
    projects.push_back(std::move(project));
  }
  if (projects.empty()) throw EmptyCorpus("no projects under " + root.string());
  return CorpusIndex(root, std::move(projects), std::move(units), std::move(models), std::move(diagnostics));
}

}  // namespace

CorpusIndex index_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("corpus root is not a directory: " + root.string());
  std::vector<std::string> project_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) project_dirs.push_back(entry.path().filename().string());
  }
  std::sort(project_dirs.begin(), project_dirs.end());
  if (project_dirs.empty()) throw EmptyCorpus("no projects under " + root.string());

  std::vector<std::pair<std::string, std::vector<std::string>>> layout;
  for (const auto& project_id : project_dirs) {
    std::vector<std::string> rels;
    fs::path proot = root / project_id;
    for (const auto& entry : fs::recursive_directory_iterator(proot)) {
      if (entry.is_regular_file() && entry.path().extension() == ".java")
        rels.push_back(fs::relative(entry.path(), proot).generic_string());
    }
    std::sort(rels.begin(), rels.end());
    layout.emplace_back(project_id, std::move(rels));
  }
  return assemble(root, std::move(layout), nullptr);
}

double tf_idf(const std::string& word, const TermCounts& document, const CorpusIndex& index, Granularity g) {
  auto it = document.find(word);
  if (it == document.end() || it->second == 0) return 0.0;
  double n = static_cast<double>(index.doc_count(g));
  double df = static_cast<double>(index.df(word, g));
  return static_cast<double>(it->second) * std::log((n + 1.0) / (df + 1.0));
}

std::vector<std::string> all_project_ids(const CorpusIndex& index) {
  std::vector<std::string> ids;
  for (const auto& p : index.projects()) ids.push_back(p.project_id);
  return ids;
}

namespace {

template <typename Item>
void sort_ranked(std::vector<std::pair<double, Item>>& scored) {
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
}

}  // namespace

std::vector<std::string> search_projects(const CorpusIndex& index, const std::vector<std::string>& keywords) {
  if (keywords.empty()) return all_project_ids(index);
  auto words = keyword_words(keywords);
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& p : index.projects()) {
    double score = 0;
    for (const auto& w : words) score += tf_idf(w, p.doc_tokens, index, Granularity::Project);
    if (score > 0) scored.emplace_back(score, p.project_id);
  }
  sort_ranked(scored);
  std::vector<std::string> out;
  for (auto& s : scored) out.push_back(std::move(s.second));
  return out;
}

std::vector<std::string> search_files(const CorpusIndex& index, const std::vector<std::string>& keywords,
                                      const std::vector<std::string>& scope, std::size_t max_results) {
  if (scope.empty() || max_results == 0) return {};
  auto words = keyword_words(keywords);
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& project_id : scope) {
    const CorpusProject* p = index.find_project(project_id);
    if (!p) continue;
    for (std::size_t u : p->units) {
      const auto& unit = index.units()[u];
      double score = 0;
      for (const auto& w : words) score += tf_idf(w, unit.token_index, index, Granularity::Unit);
      if (score > 0) scored.emplace_back(score, unit.unit_id);
    }
  }
  sort_ranked(scored);
  std::vector<std::string> out;
  for (auto& s : scored) {
    if (out.size() >= max_results) break;
    out.push_back(std::move(s.second));
  }
  return out;
}

void save_index(const CorpusIndex& index, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = "specmine-index";
  manifest["version"] = kIndexFormatVersion;
  manifest["corpus_root"] = fs::absolute(index.root()).lexically_normal().generic_string();
  json projects = json::array();
  for (const auto& p : index.projects()) {
    json units = json::array();
    for (std::size_t u : p.units) {
      const auto& unit = index.units()[u];
      units.push_back({{"unit_id", unit.unit_id},
                       {"path", unit.relative_path},
                       {"loc", unit.loc},
                       {"package", unit.package_name},
                       {"types", unit.declared_type_names},
                       {"hash", hex64(fnv1a(unit.text))}});
    }
    projects.push_back({{"project_id", p.project_id}, {"units", units}});
  }
  manifest["projects"] = projects;
  manifest["diagnostics"] = index.diagnostics();

  json postings = json::object();
  for (const auto& [word, list] : index.inverted_index()) {
    json entries = json::array();
    for (const auto& p : list) entries.push_back({index.units()[p.unit].unit_id, p.tf});
    postings[word] = entries;
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  std::ofstream(dir / "postings.json") << json{{"version", kIndexFormatVersion}, {"postings", postings}}.dump()
                                       << "\n";
}

CorpusIndex load_index(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no index manifest in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed index manifest: " + std::string(e.what()));
  }
  if (manifest.value("version", 0) != kIndexFormatVersion)
    throw IoError("unsupported index version in " + dir.string());
  fs::path root = manifest.at("corpus_root").get<std::string>();
  std::vector<std::pair<std::string, std::vector<std::string>>> layout;
  std::map<std::string, std::string> hashes;
  for (const auto& p : manifest.at("projects")) {
    std::vector<std::string> rels;
    for (const auto& u : p.at("units")) {
      rels.push_back(u.at("path").get<std::string>());
      hashes[u.at("unit_id").get<std::string>()] = u.at("hash").get<std::string>();
    }
    layout.emplace_back(p.at("project_id").get<std::string>(), std::move(rels));
  }
  return assemble(root, std::move(layout), &hashes);
}

}  // namespace specmine::corpus
