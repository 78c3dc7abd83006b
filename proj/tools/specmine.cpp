// specmine: pipeline driver over a persistent workspace.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "specmine/error.h"
#include "specmine/pipeline.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitFailure = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace specmine;
  CLI::App app{"Retrieve, abstract and adapt code subsystems from a local corpus"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path = "specmine.json";
  std::string workspace;
  std::string abstraction_id;
  bool verbose = false;
  app.add_option("--config", config_path, "config file (JSON)");
  app.add_option("--workspace", workspace, "workspace directory (overrides the config)");
  app.add_option("--abstraction", abstraction_id, "abstraction id for match, harvest and assemble");
  app.add_flag("-v,--verbose", verbose, "print diagnostics");

  const char* stages[] = {"index", "search", "extract", "abstract", "render", "match", "harvest", "assemble", "pipeline"};
  for (const char* s : stages) app.add_subcommand(s, std::string("run the ") + s + " stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  std::string stage_name = app.get_subcommands().front()->get_name();
  try {
    auto config = pipeline::load_config(config_path);
    if (!workspace.empty()) config.workspace = std::filesystem::absolute(workspace);
    pipeline::RunOptions options;
    options.abstraction = abstraction_id;
    auto artifacts = pipeline::run_stage(*pipeline::parse_stage(stage_name), config, options);
    for (const auto& a : artifacts) {
      std::cout << a.stage << ": " << a.summary << (a.cached ? " [cached]" : "") << "\n";
      if (verbose)
        for (const auto& d : a.diagnostics) std::cerr << "  " << a.stage << ": " << d << "\n";
      else if (!a.diagnostics.empty())
        std::cerr << "  " << a.stage << ": " << a.diagnostics.size() << " diagnostics (use -v)\n";
    }
    return pipeline::exit_code(artifacts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingPrerequisite& e) {
    std::cerr << "missing prerequisite: " << e.what() << "\n";
    return kExitMissing;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
