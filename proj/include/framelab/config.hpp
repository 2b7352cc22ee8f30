#pragma once

// Run configuration for the framelab command. Every key is checked; unknown
// keys are rejected with their JSON path.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "framelab/domain.hpp"
#include "framelab/errors.hpp"

namespace framelab {

/// Schema violation; `path` is a JSON pointer-like location such as
/// "tolerances.rank_tol".
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : InputError("config: " + path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Command {
  Density,
  Gap,
  FrameBounds,
  MultCheck,
  TranslateCheck,
  BuildGenerator,
  Reconstruct,
  UnionCheck,
  CorollaryDemo
};

const char* to_string(Command c);

struct PointsConfig {
  enum class Kind { None, Path, Inline, Lattice, Jittered };
  Kind kind = Kind::None;
  std::string path;
  std::size_t dim = 1;
  std::vector<double> coords;
  /// Optional analysis box, one [lo, hi] pair per axis.
  std::vector<std::pair<double, double>> box;
  double start = 0.0;
  std::size_t count = 0;
  double step = 1.0;
  double amplitude = 0.0;
};

struct GeneratorConfig {
  std::string expr;
  std::string csv;
  bool present() const { return !expr.empty() || !csv.empty(); }
};

struct BumpConfig {
  std::vector<Interval> intervals;
  double delta = 0.0;
};

struct PartConfig {
  std::vector<Interval> intervals;
  GeneratorConfig generator;
};

struct RunConfig {
  Command command = Command::FrameBounds;
  std::vector<Interval> domain;
  PointsConfig points;
  std::string multiplier;
  GeneratorConfig generator;
  std::optional<BumpConfig> bump;
  std::vector<PartConfig> parts;
  int n_per_unit = 64;
  std::vector<int> refine;
  double rank_tol = 1e-8;
  double recon_tol = 1e-10;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string format = "json";
  /// Command-specific parameters, validated by the command.
  nlohmann::json params = nlohmann::json::object();
  /// Directory that relative input paths are resolved against.
  std::string base_dir;
};

RunConfig parse_config_json(const nlohmann::json& j, const std::string& base_dir = "");
RunConfig parse_config_file(const std::string& path);

nlohmann::json config_to_json(const RunConfig& c);

/// "64,128,256" -> {64, 128, 256}; strictly increasing and >= 8.
std::vector<int> parse_refine_list(const std::string& s);

}  // namespace framelab
