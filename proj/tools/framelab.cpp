#include <iostream>

#include <CLI11.hpp>

#include "framelab/config.hpp"
#include "framelab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"framelab: frame bounds, multipliers and irregular translates"};
  std::string config_path;
  std::string out;
  std::string format;
  std::string refine;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--out", out, "report path (default: stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized suites");
  app.add_option("--refine", refine, "refinement list, e.g. 64,128,256");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : framelab::kExitUsage;
  }

  framelab::RunConfig cfg;
  try {
    cfg = framelab::parse_config_file(config_path);
    if (!out.empty()) cfg.output_path = out;
    if (!format.empty()) cfg.format = format;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (!refine.empty()) cfg.refine = framelab::parse_refine_list(refine);
  } catch (const std::exception& e) {
    std::cerr << "framelab: " << e.what() << "\n";
    return framelab::kExitUsage;
  }
  return framelab::run_and_write(cfg, std::cout, std::cerr);
}
