#include "specmine/pipeline.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "specmine/abstraction.h"
#include "specmine/error.h"
#include "specmine/resolve.h"
#include "specmine/testgen.h"
#include "specmine/text.h"

namespace specmine::pipeline {

using Json = nlohmann::ordered_json;
using abstraction::SubsystemAbs;
using srcmodel::MemberKind;

namespace {

constexpr int kStageVersion = 1;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
}

std::string file_hash(const fs::path& p) {
  if (!fs::exists(p)) return "-";
  return hex64(fnv1a(read_file(p)));
}

Json read_json(const fs::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const Json::exception& e) {
    throw IoError("malformed " + p.string() + ": " + e.what());
  }
}

void require(const fs::path& p, const std::string& stage) {
  if (!fs::exists(p)) throw MissingPrerequisite("missing " + p.string() + "; run the " + stage + " stage first");
}

std::string combine(const std::vector<std::string>& parts) {
  std::string all;
  for (const auto& p : parts) {
    all += p;
    all += '\n';
  }
  return hex64(fnv1a(all));
}

// Stage records live next to the stage outputs as <stage>.stage.json.
fs::path record_path(const PipelineConfig& c, const std::string& dir, const std::string& stage) {
  return c.workspace / dir / (stage + ".stage.json");
}

std::optional<StageArtifact> cached(const PipelineConfig& c, const std::string& dir, const std::string& stage,
                                    const std::string& hash) {
  fs::path p = record_path(c, dir, stage);
  if (!fs::exists(p)) return std::nullopt;
  Json j;
  try {
    j = Json::parse(read_file(p));
  } catch (const Json::exception&) {
    return std::nullopt;
  }
  if (j.value("input_hash", "") != hash) return std::nullopt;
  StageArtifact a;
  a.stage = stage;
  a.input_hash = hash;
  a.cached = true;
  a.empty = j.value("empty", false);
  a.summary = j.value("summary", "");
  for (const auto& o : j.value("outputs", Json::array())) {
    a.outputs.push_back(o.get<std::string>());
    if (!fs::exists(c.workspace / a.outputs.back())) return std::nullopt;
  }
  for (const auto& d : j.value("diagnostics", Json::array())) a.diagnostics.push_back(d.get<std::string>());
  return a;
}

void record(const PipelineConfig& c, const std::string& dir, const StageArtifact& a) {
  Json j;
  j["stage"] = a.stage;
  j["input_hash"] = a.input_hash;
  j["empty"] = a.empty;
  j["summary"] = a.summary;
  j["outputs"] = a.outputs;
  j["diagnostics"] = a.diagnostics;
  write_file(record_path(c, dir, a.stage), j.dump(2) + "\n");
}

std::string corpus_hash(const fs::path& root) {
  std::vector<std::string> parts;
  if (!fs::exists(root)) return "-";
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    parts.push_back(fs::relative(e.path(), root).generic_string() + " " + file_hash(e.path()));
  }
  std::sort(parts.begin(), parts.end());
  return combine(parts);
}

// --- config ---

const std::set<std::string> kTopKeys = {"corpus", "workspace", "keywords", "key_terms", "thresholds",
                                        "naming_conventions", "remove_unused", "library_mapping"};
const std::set<std::string> kThresholdKeys = {
    "min_loc",         "min_types",          "max_loc",           "max_units",           "max_test_fraction",
    "min_relevancy",   "hard_cap",           "max_seeds",         "merge_threshold",     "class_merge_threshold",
    "match_threshold", "class_match_threshold", "suggested_terms"};

std::vector<std::string> string_list(const Json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("'" + key + "' must be a list of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a list of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("threshold '" + key + "' must be a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& key) {
  double v = number(j, key);
  if (v < 0 || v != static_cast<double>(static_cast<long long>(v)))
    throw ConfigError("threshold '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

// --- serialisation of harvested tests ---

Json to_json(const testgen::TestMethod& t) {
  Json j;
  j["subsystem"] = t.subsystem_id;
  j["project"] = t.project;
  j["unit"] = t.unit;
  j["class"] = t.test_class;
  j["name"] = t.name;
  j["text"] = t.text;
  j["helpers"] = Json::array();
  for (const auto& h : t.helpers) j["helpers"].push_back({{"name", h.name}, {"text", h.text}, {"lifecycle", h.lifecycle}});
  j["imports"] = t.imports;
  j["refs"] = Json::array();
  for (const auto& r : t.refs)
    j["refs"].push_back({{"type", r.type},
                         {"kind", srcmodel::to_string(r.kind)},
                         {"name", r.name},
                         {"arity", r.arity},
                         {"literals", r.literal_args}});
  j["types"] = t.types;
  j["foreign"] = t.foreign;
  j["hash"] = t.hash;
  return j;
}

testgen::TestMethod test_from_json(const Json& j) {
  testgen::TestMethod t;
  t.subsystem_id = j.at("subsystem");
  t.project = j.at("project");
  t.unit = j.at("unit");
  t.test_class = j.at("class");
  t.name = j.at("name");
  t.text = j.at("text");
  for (const auto& h : j.at("helpers")) t.helpers.push_back({h.at("name"), h.at("text"), h.at("lifecycle")});
  t.imports = j.at("imports").get<std::vector<std::string>>();
  for (const auto& r : j.at("refs")) {
    testgen::MemberRef ref;
    ref.type = r.at("type");
    std::string kind = r.at("kind");
    ref.kind = kind == "field" ? MemberKind::Field : kind == "constructor" ? MemberKind::Constructor : MemberKind::Method;
    ref.name = r.at("name");
    ref.arity = r.at("arity");
    ref.literal_args = r.at("literals").get<std::vector<std::string>>();
    t.refs.push_back(ref);
  }
  t.types = j.at("types").get<std::vector<std::string>>();
  t.foreign = j.at("foreign").get<std::vector<std::string>>();
  t.hash = j.at("hash");
  return t;
}

}  // namespace

corpus::KeywordSpec PipelineConfig::keyword_spec() const { return corpus::KeywordSpec::from_lists(keywords, key_terms); }

std::string PipelineConfig::canonical() const {
  Json j;
  j["keywords"] = keywords;
  j["key_terms"] = key_terms;
  j["hard_cap"] = limits.hard_cap;
  j["min_loc"] = filter.min_loc;
  j["min_types"] = filter.min_types;
  j["max_loc"] = filter.max_loc;
  j["max_units"] = filter.max_units;
  j["max_test_fraction"] = filter.max_test_fraction;
  j["min_relevancy"] = filter.min_relevancy;
  j["max_seeds"] = max_seeds;
  j["merge_threshold"] = merge_threshold;
  j["class_merge_threshold"] = class_merge_threshold;
  j["match_threshold"] = match_threshold;
  j["class_match_threshold"] = class_match_threshold;
  j["suggested_terms"] = suggested_terms;
  j["naming_conventions"] = naming.enabled;
  j["remove_unused"] = remove_unused;
  return j.dump();
}

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kTopKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  auto path_of = [&](const std::string& key) -> fs::path {
    if (!j.contains(key)) return {};
    if (!j[key].is_string()) throw ConfigError("'" + key + "' must be a path string");
    fs::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : (base_dir / p).lexically_normal();
  };

  PipelineConfig c;
  c.corpus = path_of("corpus");
  c.workspace = path_of("workspace");
  c.library_mapping = path_of("library_mapping");
  if (j.contains("keywords")) c.keywords = string_list(j["keywords"], "keywords");
  if (j.contains("key_terms")) c.key_terms = string_list(j["key_terms"], "key_terms");
  if (j.contains("naming_conventions")) {
    if (!j["naming_conventions"].is_boolean()) throw ConfigError("'naming_conventions' must be true or false");
    c.naming.enabled = j["naming_conventions"].get<bool>();
  }
  if (j.contains("remove_unused")) {
    if (!j["remove_unused"].is_boolean()) throw ConfigError("'remove_unused' must be true or false");
    c.remove_unused = j["remove_unused"].get<bool>();
  }
  if (j.contains("thresholds")) {
    const Json& t = j["thresholds"];
    if (!t.is_object()) throw ConfigError("'thresholds' must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!kThresholdKeys.count(key)) throw ConfigError("unknown threshold '" + key + "'");
      if (number(value, key) <= 0) throw ConfigError("threshold '" + key + "' must be positive");
    }
    auto num = [&](const char* key, double& out) {
      if (t.contains(key)) out = number(t[key], key);
    };
    auto cnt = [&](const char* key, std::size_t& out) {
      if (t.contains(key)) out = count(t[key], key);
    };
    cnt("min_loc", c.filter.min_loc);
    cnt("min_types", c.filter.min_types);
    cnt("max_loc", c.filter.max_loc);
    cnt("max_units", c.filter.max_units);
    num("max_test_fraction", c.filter.max_test_fraction);
    num("min_relevancy", c.filter.min_relevancy);
    cnt("hard_cap", c.limits.hard_cap);
    cnt("max_seeds", c.max_seeds);
    num("merge_threshold", c.merge_threshold);
    num("class_merge_threshold", c.class_merge_threshold);
    num("match_threshold", c.match_threshold);
    num("class_match_threshold", c.class_match_threshold);
    cnt("suggested_terms", c.suggested_terms);
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::absolute(file).parent_path());
}

void validate(const PipelineConfig& c) {
  if (c.corpus.empty()) throw ConfigError("'corpus' is required");
  if (c.workspace.empty()) throw ConfigError("'workspace' is required");
  auto spec = c.keyword_spec();
  if (spec.file_keywords.empty()) throw ConfigError("'keywords' needs at least one file keyword (no '@' prefix)");
  if (spec.key_terms.empty()) throw ConfigError("'key_terms' must not be empty");
  for (const auto& w : c.keywords)
    if (w.empty() || w.find_first_of(" \t\n") != std::string::npos) throw ConfigError("bad keyword '" + w + "'");
  for (const auto& w : c.key_terms)
    if (w.empty() || w.find_first_of(" \t\n") != std::string::npos) throw ConfigError("bad key term '" + w + "'");
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string("threshold '") + name + "' must be positive");
  };
  positive(static_cast<double>(c.filter.min_loc), "min_loc");
  positive(static_cast<double>(c.filter.min_types), "min_types");
  positive(static_cast<double>(c.filter.max_loc), "max_loc");
  positive(static_cast<double>(c.filter.max_units), "max_units");
  positive(c.filter.max_test_fraction, "max_test_fraction");
  positive(c.filter.min_relevancy, "min_relevancy");
  positive(static_cast<double>(c.limits.hard_cap), "hard_cap");
  positive(static_cast<double>(c.max_seeds), "max_seeds");
  positive(c.merge_threshold, "merge_threshold");
  positive(c.class_merge_threshold, "class_merge_threshold");
  positive(c.match_threshold, "match_threshold");
  positive(c.class_match_threshold, "class_match_threshold");
  positive(static_cast<double>(c.suggested_terms), "suggested_terms");
  for (double v : {c.filter.max_test_fraction, c.merge_threshold, c.class_merge_threshold, c.match_threshold,
                   c.class_match_threshold})
    if (v > 1.0) throw ConfigError("fractions and similarity thresholds must not exceed 1");
  if (c.filter.min_loc > c.filter.max_loc) throw ConfigError("min_loc exceeds max_loc");
  std::error_code ec;
  fs::create_directories(c.workspace, ec);
  if (ec || !fs::is_directory(c.workspace)) throw ConfigError("workspace " + c.workspace.string() + " is not writable");
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Index: return "index";
    case Stage::Search: return "search";
    case Stage::Extract: return "extract";
    case Stage::Abstract: return "abstract";
    case Stage::Render: return "render";
    case Stage::Match: return "match";
    case Stage::Harvest: return "harvest";
    case Stage::Assemble: return "assemble";
    case Stage::Pipeline: return "pipeline";
  }
  return "?";
}

std::optional<Stage> parse_stage(const std::string& name) {
  for (Stage s : {Stage::Index, Stage::Search, Stage::Extract, Stage::Abstract, Stage::Render, Stage::Match,
                  Stage::Harvest, Stage::Assemble, Stage::Pipeline})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

int exit_code(const std::vector<StageArtifact>& artifacts) {
  for (const auto& a : artifacts)
    if (a.empty) return 1;
  return 0;
}

std::vector<AbstractionEntry> list_abstractions(const fs::path& workspace) {
  fs::path manifest = workspace / "abstractions" / "manifest.json";
  require(manifest, "render");
  std::vector<AbstractionEntry> out;
  Json doc = read_json(manifest);
  for (const auto& e : doc.at("abstractions")) {
    AbstractionEntry a;
    a.id = e.at("id");
    a.interface_name = e.at("interface");
    a.file = e.at("file").get<std::string>();
    a.uml = e.at("uml").get<std::string>();
    a.merged_from = e.at("merged_from").get<std::vector<std::string>>();
    out.push_back(a);
  }
  return out;
}

namespace {

// --- stages ---

StageArtifact stage_index(const PipelineConfig& c) {
  std::string hash = combine({"index", std::to_string(kStageVersion), corpus_hash(c.corpus)});
  if (auto hit = cached(c, "index", "index", hash)) return *hit;
  StageArtifact a;
  a.stage = "index";
  a.input_hash = hash;
  fs::path dir = c.workspace / "index";
  try {
    auto index = corpus::index_corpus(c.corpus);
    corpus::save_index(index, dir);
    a.diagnostics = index.diagnostics();
    a.summary = std::to_string(index.projects().size()) + " projects, " + std::to_string(index.units().size()) +
                " units indexed";
  } catch (const EmptyCorpus& e) {
    a.empty = true;
    a.diagnostics.push_back(e.what());
    a.summary = "no projects found";
    fs::remove_all(dir);
    fs::create_directories(dir);
    record(c, "index", a);
    return a;
  }
  a.outputs = {"index/manifest.json", "index/postings.json"};
  record(c, "index", a);
  return a;
}

StageArtifact stage_search(const PipelineConfig& c) {
  fs::path manifest = c.workspace / "index" / "manifest.json";
  require(manifest, "index");
  std::string hash = combine({"search", std::to_string(kStageVersion), c.canonical(), file_hash(manifest)});
  if (auto hit = cached(c, "index", "search", hash)) return *hit;
  auto index = corpus::load_index(c.workspace / "index");
  auto spec = c.keyword_spec();
  auto projects =
      spec.project_keywords.empty() ? corpus::all_project_ids(index) : corpus::search_projects(index, spec.project_keywords);
  auto seeds = corpus::search_files(index, spec.file_keywords, projects, c.max_seeds);
  Json j;
  j["projects"] = projects;
  j["seeds"] = seeds;
  write_file(c.workspace / "index" / "search.json", j.dump(2) + "\n");
  StageArtifact a;
  a.stage = "search";
  a.input_hash = hash;
  a.outputs = {"index/search.json"};
  a.empty = seeds.empty();
  a.summary = std::to_string(projects.size()) + " projects matched, " + std::to_string(seeds.size()) + " seed files";
  record(c, "index", a);
  return a;
}

StageArtifact stage_extract(const PipelineConfig& c) {
  fs::path search = c.workspace / "index" / "search.json";
  require(search, "search");
  fs::path manifest = c.workspace / "index" / "manifest.json";
  std::string mapping_hash = c.library_mapping.empty() ? "-" : file_hash(c.library_mapping);
  std::string hash = combine(
      {"extract", std::to_string(kStageVersion), c.canonical(), file_hash(manifest), file_hash(search), mapping_hash});
  if (auto hit = cached(c, "subsystems", "extract", hash)) return *hit;

  auto index = corpus::load_index(c.workspace / "index");
  auto model = srcmodel::resolve_references(index);
  extract::LibraryMapping mapping;
  if (!c.library_mapping.empty()) mapping = extract::LibraryMapping::load(c.library_mapping);
  extract::ExtractOptions options;
  options.limits = c.limits;
  options.filter = c.filter;
  options.key_terms = c.keyword_spec().key_terms;
  auto seeds = read_json(search).at("seeds").get<std::vector<std::string>>();
  auto result = extract::extract_subsystems(index, model, seeds, options, mapping);

  fs::path dir = c.workspace / "subsystems";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Json j;
  j["candidates"] = result.candidates;
  j["kept"] = Json::array();
  StageArtifact a;
  a.stage = "extract";
  a.input_hash = hash;
  for (const auto& s : result.kept) {
    extract::save_subsystem(s, dir / s.id);
    j["kept"].push_back(s.id);
    a.outputs.push_back("subsystems/" + s.id + "/manifest.json");
  }
  j["rejected"] = Json::array();
  std::map<std::string, int> reasons;
  for (const auto& r : result.rejected) {
    j["rejected"].push_back({{"id", r.subsystem_id}, {"reason", r.reason}});
    reasons[r.reason]++;
  }
  j["diagnostics"] = result.diagnostics;
  write_file(dir / "manifest.json", j.dump(2) + "\n");
  a.outputs.push_back("subsystems/manifest.json");
  a.diagnostics = result.diagnostics;
  a.empty = result.kept.empty();
  a.summary = std::to_string(result.candidates) + " subsystems found, " + std::to_string(result.kept.size()) + " kept";
  std::vector<std::string> parts;
  for (const auto& [reason, n] : reasons) parts.push_back(reason + " " + std::to_string(n));
  if (!parts.empty()) a.summary += " (rejected: " + join(parts, ", ") + ")";
  record(c, "subsystems", a);
  return a;
}

std::vector<extract::Subsystem> load_kept(const PipelineConfig& c) {
  fs::path manifest = c.workspace / "subsystems" / "manifest.json";
  require(manifest, "extract");
  std::vector<extract::Subsystem> out;
  Json doc = read_json(manifest);
  for (const auto& id : doc.at("kept")) out.push_back(extract::load_subsystem(c.workspace / "subsystems" / id.get<std::string>()));
  return out;
}

std::string subsystems_hash(const PipelineConfig& c) {
  fs::path manifest = c.workspace / "subsystems" / "manifest.json";
  require(manifest, "extract");
  std::vector<std::string> parts{file_hash(manifest)};
  Json doc = read_json(manifest);
  for (const auto& id : doc.at("kept"))
    parts.push_back(file_hash(c.workspace / "subsystems" / id.get<std::string>() / "manifest.json"));
  return combine(parts);
}

StageArtifact stage_abstract(const PipelineConfig& c) {
  std::string hash = combine({"abstract", std::to_string(kStageVersion), c.canonical(), subsystems_hash(c),
                              file_hash(c.workspace / "index" / "manifest.json")});
  if (auto hit = cached(c, "abstractions", "abstract", hash)) return *hit;
  auto subsystems = load_kept(c);
  auto index = corpus::load_index(c.workspace / "index");
  auto spec = c.keyword_spec();
  StageArtifact a;
  a.stage = "abstract";
  a.input_hash = hash;
  std::vector<SubsystemAbs> list;
  for (const auto& s : subsystems) {
    try {
      auto abs = abstraction::abstract_subsystem(s, spec.key_terms);
      abs.search = "PACKAGE,PACKAGE_USED," + std::to_string(c.max_seeds) + ",CORPUS";
      abs.keywords = c.keywords;
      abs.keyterms = c.key_terms;
      list.push_back(std::move(abs));
    } catch (const EmptyAbstraction& e) {
      a.diagnostics.push_back(e.what());
    }
  }
  auto merged = abstraction::merge_all(std::move(list), c.merge_threshold, c.class_merge_threshold);
  Json j = Json::array();
  for (auto& abs : merged) {
    abs.suggested_terms = abstraction::suggested_terms(abs, subsystems, index, c.suggested_terms);
    j.push_back({{"id", abs.id},
                 {"relevancy", abs.relevancy},
                 {"merged_from", abs.merged_from},
                 {"text", abstraction::render_interface(abs)}});
  }
  write_file(c.workspace / "abstractions" / "abstract.json", j.dump(2) + "\n");
  a.outputs = {"abstractions/abstract.json"};
  a.empty = merged.empty();
  a.summary = std::to_string(subsystems.size()) + " subsystems abstracted, " + std::to_string(merged.size()) +
              " abstractions returned";
  record(c, "abstractions", a);
  return a;
}

StageArtifact stage_render(const PipelineConfig& c) {
  fs::path input = c.workspace / "abstractions" / "abstract.json";
  require(input, "abstract");
  std::string hash = combine({"render", std::to_string(kStageVersion), file_hash(input)});
  if (auto hit = cached(c, "abstractions", "render", hash)) return *hit;

  fs::path dir = c.workspace / "abstractions";
  std::map<std::string, std::string> previous;  // file -> hash when rendered
  if (fs::exists(dir / "manifest.json")) {
    Json doc = read_json(dir / "manifest.json");
    for (const auto& e : doc.at("abstractions"))
      previous[e.at("file").get<std::string>()] = e.at("rendered_hash").get<std::string>();
  }

  StageArtifact a;
  a.stage = "render";
  a.input_hash = hash;
  Json entries = Json::array();
  std::set<std::string> ids;
  std::size_t kept_edits = 0;
  for (const auto& e : read_json(input)) {
    std::string id = e.at("id");
    std::string text = e.at("text");
    auto abs = abstraction::parse_abstraction(text);
    ids.insert(id);
    std::string file = "abstractions/" + id + "/" + abs.interface_name + ".java";
    std::string uml = "abstractions/" + id + "/" + abs.interface_name + ".uxf";
    fs::path target = c.workspace / file;
    bool edited = fs::exists(target) && previous.count(file) && file_hash(target) != previous[file];
    if (edited) {
      ++kept_edits;
      a.diagnostics.push_back("kept edited " + file);
    } else {
      write_file(target, text);
    }
    write_file(c.workspace / uml, abstraction::render_uml(abs));
    entries.push_back({{"id", id},
                       {"interface", abs.interface_name},
                       {"file", file},
                       {"uml", uml},
                       {"rendered_hash", hex64(fnv1a(text))},
                       {"merged_from", e.at("merged_from")},
                       {"relevancy", e.at("relevancy")}});
    a.outputs.push_back(file);
    a.outputs.push_back(uml);
  }
  for (const auto& d : fs::directory_iterator(dir))
    if (d.is_directory() && !ids.count(d.path().filename().string())) fs::remove_all(d.path());
  Json m;
  m["abstractions"] = entries;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  a.outputs.push_back("abstractions/manifest.json");
  a.summary = std::to_string(entries.size()) + " abstractions rendered";
  if (kept_edits) a.summary += ", " + std::to_string(kept_edits) + " edited files kept";
  record(c, "abstractions", a);
  return a;
}

std::vector<AbstractionEntry> selected(const PipelineConfig& c, const RunOptions& options) {
  auto all = list_abstractions(c.workspace);
  if (options.abstraction.empty()) return all;
  for (const auto& e : all)
    if (e.id == options.abstraction) return {e};
  throw ConfigError("unknown abstraction '" + options.abstraction + "'");
}

match::MatchOptions match_options(const PipelineConfig& c) {
  match::MatchOptions o;
  o.threshold = c.match_threshold;
  o.class_threshold = c.class_match_threshold;
  o.key_terms = c.keyword_spec().key_terms;
  return o;
}

std::string selection_key(const std::vector<AbstractionEntry>& entries) {
  std::string key;
  for (const auto& e : entries) key += e.id + ",";
  return key;
}

StageArtifact stage_match(const PipelineConfig& c, const RunOptions& options) {
  auto entries = selected(c, options);
  std::vector<std::string> parts{"match", std::to_string(kStageVersion), c.canonical(), subsystems_hash(c),
                                 selection_key(entries)};
  for (const auto& e : entries) parts.push_back(file_hash(c.workspace / e.file));
  std::string hash = combine(parts);
  if (auto hit = cached(c, "matches", "match", hash)) return *hit;

  auto subsystems = load_kept(c);
  StageArtifact a;
  a.stage = "match";
  a.input_hash = hash;
  std::size_t total = 0;
  std::vector<std::string> summaries;
  for (const auto& e : entries) {
    require(c.workspace / e.file, "render");
    auto edited = abstraction::parse_abstraction(read_file(c.workspace / e.file));
    fs::path dir = c.workspace / "matches" / e.id;
    fs::remove_all(dir);
    fs::create_directories(dir);
    Json results = Json::array();
    std::size_t matched = 0;
    for (const auto& s : subsystems) {
      Json r;
      r["subsystem"] = s.id;
      try {
        auto mapping = match::match_subsystem(edited, s, match_options(c));
        auto plan = match::plan_transforms(mapping, c.naming, c.remove_unused);
        auto out = match::apply_transforms(s, plan);
        extract::save_subsystem(out, dir / s.id);
        write_file(dir / s.id / "plan.txt", plan.describe());
        r["status"] = "matched";
        r["score"] = mapping.score;
        r["ops"] = plan.ops.size();
        r["stubs"] = match::stubbed_members(out);
        r["mismatches"] = match::signature_mismatches(out, edited, match_options(c).key_terms);
        ++matched;
      } catch (const NoViableMatch& ex) {
        r["status"] = "no-viable-match";
        r["reason"] = ex.what();
      } catch (const TransformConflict& ex) {
        r["status"] = "conflict";
        r["reason"] = ex.what();
        a.diagnostics.push_back(e.id + " / " + s.id + ": " + ex.what());
      }
      results.push_back(r);
    }
    Json m;
    m["abstraction"] = e.id;
    m["file"] = e.file.generic_string();
    m["results"] = results;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
    a.outputs.push_back("matches/" + e.id + "/manifest.json");
    total += matched;
    summaries.push_back(e.id + ": " + std::to_string(matched) + " of " + std::to_string(subsystems.size()) +
                        " subsystems matched");
  }
  a.empty = total == 0;
  a.summary = join(summaries, "; ");
  record(c, "matches", a);
  return a;
}

StageArtifact stage_harvest(const PipelineConfig& c, const RunOptions& options) {
  auto entries = selected(c, options);
  std::vector<std::string> parts{"harvest", std::to_string(kStageVersion), c.canonical(), subsystems_hash(c),
                                 file_hash(c.workspace / "index" / "manifest.json"), selection_key(entries)};
  for (const auto& e : entries) {
    require(c.workspace / "matches" / e.id / "manifest.json", "match");
    parts.push_back(file_hash(c.workspace / "matches" / e.id / "manifest.json"));
    parts.push_back(file_hash(c.workspace / e.file));
  }
  std::string hash = combine(parts);
  if (auto hit = cached(c, "tests", "harvest", hash)) return *hit;

  auto index = corpus::load_index(c.workspace / "index");
  StageArtifact a;
  a.stage = "harvest";
  a.input_hash = hash;
  std::vector<std::string> summaries;
  for (const auto& e : entries) {
    auto edited = abstraction::parse_abstraction(read_file(c.workspace / e.file));
    Json matches = read_json(c.workspace / "matches" / e.id / "manifest.json");
    Json out = Json::array();
    std::size_t units = 0, transformed = 0, kept = 0;
    for (const auto& r : matches.at("results")) {
      if (r.at("status") != "matched") continue;
      std::string sid = r.at("subsystem");
      auto sub = extract::load_subsystem(c.workspace / "subsystems" / sid);
      auto mapping = match::match_subsystem(edited, sub, match_options(c));
      auto plan = match::plan_transforms(mapping, c.naming, c.remove_unused);
      auto test_units = testgen::find_test_units(index, sub);
      auto result = testgen::transform_tests(test_units, sub, index, plan);
      Json h;
      h["subsystem"] = sid;
      h["units"] = Json::array();
      for (const auto& u : test_units) h["units"].push_back(u.unit_id);
      h["tests"] = Json::array();
      h["pruned"] = Json::array();
      for (const auto& t : result.tests) {
        auto problems = testgen::reference_problems(t, edited);
        if (problems.empty()) {
          h["tests"].push_back(to_json(t));
          ++kept;
        } else {
          h["pruned"].push_back({{"name", t.test_class + "." + t.name}, {"problems", problems}});
        }
      }
      h["diagnostics"] = result.diagnostics;
      for (const auto& d : result.diagnostics) a.diagnostics.push_back(d);
      units += test_units.size();
      transformed += result.tests.size();
      out.push_back(h);
    }
    write_file(c.workspace / "tests" / e.id / "harvest.json", out.dump(2) + "\n");
    a.outputs.push_back("tests/" + e.id + "/harvest.json");
    summaries.push_back(e.id + ": " + std::to_string(units) + " test units, " + std::to_string(transformed) +
                        " tests transformed, " + std::to_string(kept) + " kept");
  }
  a.summary = join(summaries, "; ");
  record(c, "tests", a);
  return a;
}

StageArtifact stage_assemble(const PipelineConfig& c, const RunOptions& options) {
  auto entries = selected(c, options);
  std::vector<std::string> parts{"assemble", std::to_string(kStageVersion), selection_key(entries)};
  for (const auto& e : entries) {
    require(c.workspace / "tests" / e.id / "harvest.json", "harvest");
    parts.push_back(file_hash(c.workspace / "tests" / e.id / "harvest.json"));
    parts.push_back(file_hash(c.workspace / e.file));
  }
  std::string hash = combine(parts);
  if (auto hit = cached(c, "tests", "assemble", hash)) return *hit;

  StageArtifact a;
  a.stage = "assemble";
  a.input_hash = hash;
  std::vector<std::string> summaries;
  for (const auto& e : entries) {
    auto edited = abstraction::parse_abstraction(read_file(c.workspace / e.file));
    fs::path dir = c.workspace / "tests" / e.id;
    std::vector<std::pair<std::string, std::vector<testgen::TestMethod>>> lists;
    for (const auto& h : read_json(dir / "harvest.json")) {
      std::vector<testgen::TestMethod> tests;
      for (const auto& t : h.at("tests")) tests.push_back(test_from_json(t));
      lists.emplace_back(h.at("subsystem").get<std::string>(), std::move(tests));
    }
    std::sort(lists.begin(), lists.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::vector<testgen::TestMethod>> ordered;
    for (auto& [id, tests] : lists) ordered.push_back(std::move(tests));
    auto suite = testgen::dedup_and_assemble(ordered, edited);
    for (const auto& f : fs::directory_iterator(dir))
      if (f.path().extension() == ".java") fs::remove(f.path());
    std::string file = "tests/" + e.id + "/" + suite.class_name + ".java";
    write_file(c.workspace / file, suite.render());
    write_file(dir / "manifest.json", suite.manifest());
    a.outputs.push_back(file);
    a.outputs.push_back("tests/" + e.id + "/manifest.json");
    std::vector<std::string> prov;
    for (const auto& [id, n] : suite.provenance) prov.push_back(std::to_string(n) + " from " + id);
    std::string s = e.id + ": " + std::to_string(suite.tests.size()) + " tests";
    if (!prov.empty()) s += " (" + join(prov, ", ") + ")";
    summaries.push_back(s);
  }
  a.summary = join(summaries, "; ");
  record(c, "tests", a);
  return a;
}

}  // namespace

std::vector<StageArtifact> run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options) {
  validate(config);
  switch (stage) {
    case Stage::Index: return {stage_index(config)};
    case Stage::Search: return {stage_search(config)};
    case Stage::Extract: return {stage_extract(config)};
    case Stage::Abstract: return {stage_abstract(config)};
    case Stage::Render: return {stage_render(config)};
    case Stage::Match: return {stage_match(config, options)};
    case Stage::Harvest: return {stage_harvest(config, options)};
    case Stage::Assemble: return {stage_assemble(config, options)};
    case Stage::Pipeline: break;
  }
  std::vector<StageArtifact> all;
  for (Stage s : {Stage::Index, Stage::Search, Stage::Extract, Stage::Abstract, Stage::Render, Stage::Match,
                  Stage::Harvest, Stage::Assemble}) {
    auto r = run_stage(s, config, options);
    all.insert(all.end(), r.begin(), r.end());
    if (all.back().empty) break;
  }
  return all;
}

}  // namespace specmine::pipeline
