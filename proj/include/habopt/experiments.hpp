#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "habopt/optimize.hpp"
#include "habopt/resource.hpp"

namespace habopt {

/// How a scenario builds its fixed resource field (solve / mu_sweep).
struct ResourceSpec {
  std::string type = "crenel";       ///< constant | crenel | random
  std::vector<Interval> intervals;   ///< crenel support; default {(0, m0/kappa)}
  std::uint64_t seed = 1;            ///< random-field seed
};

/// One JSON document drives one scenario run. Everything has a default;
/// validation reports the offending field before any file is written.
struct ScenarioConfig {
  std::string scenario;
  int dim = 1;
  std::vector<int> cells;       ///< per-axis cell counts; default 256 (1D), 64x64 (2D)
  double kappa = 1.0;
  double m0 = 0.4;
  std::vector<double> mu_list;  ///< scenario-specific default when empty
  std::uint64_t seed = 0;
  int n_starts = 4;
  int threads = 1;
  std::string out_dir = "out";
  ResourceSpec resource;
  std::vector<double> split_fractions;  ///< double-crenel splits; default 0.1..0.9
  SteadyOptions steady;
  OptimOptions optim;
};

/// Parses and validates a config document; throws ConfigError naming the
/// offending field. `scenario_override` (from the CLI) must match any
/// scenario named in the document.
ScenarioConfig config_from_json(const nlohmann::json& j,
                                const std::string& scenario_override = "");
ScenarioConfig load_config(const std::string& path,
                           const std::string& scenario_override = "");

/// Runs the configured scenario, writing manifest.json, CSV reports, field
/// JSONs and SVG figures under cfg.out_dir. Deterministic for a fixed
/// config+seed: CSV bytes are identical across reruns.
void run_scenario(const ScenarioConfig& cfg);

const std::vector<std::string>& scenario_names();

/// Exhaustive 1D evaluation of F over single crenels at every cell-aligned
/// offset (plus the exact right-boundary offset) and over symmetric
/// equal-mass double crenels whose central-gap fraction ranges over the
/// given splits (s -> 1 degenerates to plateaus on both boundaries).
struct CrenelScan {
  struct Row {
    std::string family;  ///< "single" or "double"
    double parameter;    ///< offset a, or split fraction s
    double f;
  };
  std::vector<Row> rows;
  double best_single_offset;
  double best_single_f;
  double best_double_split;  ///< NaN when split_fractions is empty
  double best_double_f;
};
CrenelScan scan_crenels_1d(const Grid& grid, const ConstraintSet& c, double mu,
                           const std::vector<double>& split_fractions,
                           const SteadyOptions& steady = {});

}  // namespace habopt
