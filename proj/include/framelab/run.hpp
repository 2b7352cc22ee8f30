#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "framelab/config.hpp"

namespace framelab {

constexpr int kExitConsistent = 0;
constexpr int kExitInconsistent = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct RunResult {
  bool consistent = false;
  /// Human-readable summary, also stored in report["verdict"].
  std::string verdict;
  nlohmann::json report;
  /// Plot data for --format csv.
  std::string csv;
};

/// Executes the command. Errors propagate as framelab exceptions.
RunResult run(const RunConfig& config);

/// Runs, writes the report (to config.output_path or `out`) and maps errors
/// to exit codes; messages go to `err`.
int run_and_write(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Exit code for an exception thrown by run().
int exit_code_for(const std::exception& e);

}  // namespace framelab
