#include "habopt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "habopt/errors.hpp"
#include "habopt/io.hpp"
#include "habopt/steady.hpp"
#include "habopt/svg.hpp"

namespace habopt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr int kManifestVersion = 1;

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw ConfigError(field, msg);
}

void check_keys(const json& j, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) bad(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown field");
  }
}

double require_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "must be a number");
  return j.get<double>();
}

int require_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "must be an integer");
  return j.get<int>();
}

std::uint64_t require_seed(const json& j, const std::string& field) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                 j.get<std::int64_t>() < 0))
    bad(field, "must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string require_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "must be a string");
  return j.get<std::string>();
}

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

std::vector<double> default_mu_list(const std::string& scenario) {
  if (scenario == "mu_sweep") return {1.0, 10.0, 100.0, 1000.0};
  if (scenario == "crenel_study_1d") return log_space(1e-3, 1e1, 9);
  if (scenario == "fragmentation_small_mu") return log_space(1e-3, 1e-1, 5);
  if (scenario == "mu_star_estimate") return {0.1, 0.5, 1.0, 3.0, 10.0};
  if (scenario == "concentration_2d") return {0.3, 1.0, 3.0, 10.0};
  return {1.0};  // solve, optimize
}

json config_to_json(const ScenarioConfig& cfg) {
  json resource = {{"type", cfg.resource.type}};
  if (cfg.resource.type == "crenel") {
    json arr = json::array();
    for (const auto& iv : cfg.resource.intervals) arr.push_back({iv.first, iv.second});
    resource["intervals"] = arr;
  } else if (cfg.resource.type == "random") {
    resource["seed"] = cfg.resource.seed;
  }
  return {{"scenario", cfg.scenario},
          {"grid", {{"dim", cfg.dim}, {"cells", cfg.cells}}},
          {"constraints", {{"kappa", cfg.kappa}, {"m0", cfg.m0}}},
          {"mu_list", cfg.mu_list},
          {"seed", cfg.seed},
          {"n_starts", cfg.n_starts},
          {"threads", cfg.threads},
          {"out_dir", cfg.out_dir},
          {"resource", resource},
          {"split_fractions", cfg.split_fractions},
          {"steady",
           {{"newton_tol", cfg.steady.newton_tol},
            {"max_newton_iters", cfg.steady.max_newton_iters},
            {"damping_min", cfg.steady.damping_min}}},
          {"optimizer",
           {{"strategy", to_string(cfg.optim.strategy)},
            {"step0", cfg.optim.step0},
            {"max_iters", cfg.optim.max_iters},
            {"f_rel_tol", cfg.optim.f_rel_tol},
            {"stall_window", cfg.optim.stall_window}}}};
}

// --- report plumbing ---------------------------------------------------

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct OutDir {
  fs::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    write_text_file((dir / name).string(), content);
    written.push_back(name);
  }
};

std::string cells_label(const std::vector<int>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(cells[i]);
  }
  return s;
}

std::string fd(double x) { return format_double(x); }

// The first five columns of every CSV row: kappa, m0, mu, N, seed.
std::vector<std::string> echo(const ScenarioConfig& cfg, double mu) {
  return {fd(cfg.kappa), fd(cfg.m0), fd(mu), cells_label(cfg.cells),
          std::to_string(cfg.seed)};
}

void append(std::vector<std::string>& row, std::initializer_list<std::string> cells) {
  row.insert(row.end(), cells);
}

std::string field_svg(const ScalarField& f, double vmax, const std::string& label) {
  if (f.grid().dim() == 1 && label.rfind("theta", 0) == 0)
    return profile_svg(f, 0.0, vmax, label);
  return heatmap_svg(f, 0.0, vmax, label);
}

ResourceField build_resource(const Grid& grid, const ConstraintSet& c,
                             const ResourceSpec& spec) {
  if (spec.type == "constant") return {ScalarField(grid, c.m0), c};
  if (spec.type == "random") return make_random(grid, c, spec.seed);
  return make_crenel_1d(grid, c, spec.intervals);
}

OptimOptions runtime_optim(const ScenarioConfig& cfg) {
  OptimOptions oo = cfg.optim;
  oo.seed = cfg.seed;
  oo.steady = cfg.steady;
  return oo;
}

double l1_distance(const Grid& grid, const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (int i = 0; i < grid.total_cells(); ++i) s += std::abs(a[i] - b[i]);
  return grid.cell_volume() * s;
}

// --- scenarios ----------------------------------------------------------

void scenario_solve(const ScenarioConfig& cfg, const Grid& grid, const ConstraintSet& c,
                    const ResourceField& m, OutDir& out) {
  out.write("m.json", resource_to_json(m).dump(2) + "\n");
  out.write("m.svg", heatmap_svg(m.field(), 0.0, c.kappa, "m"));
  Csv csv({"kappa", "m0", "mu", "N", "seed", "resource", "f", "excess", "residual_norm",
           "newton_iterations", "theta_min", "theta_max"});
  for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
    const double mu = cfg.mu_list[i];
    const SteadySolution sol = solve_steady(grid, m, mu, cfg.steady);
    out.write("theta_" + std::to_string(i) + ".json", steady_to_json(sol).dump(2) + "\n");
    out.write("theta_" + std::to_string(i) + ".svg",
              field_svg(sol.theta, c.kappa, "theta mu=" + fd(mu)));
    auto row = echo(cfg, mu);
    append(row, {cfg.resource.type, fd(sol.total_population),
                 fd(sol.total_population - c.m0), fd(sol.residual_norm),
                 std::to_string(sol.iterations), fd(min_value(sol.theta)),
                 fd(max_value(sol.theta))});
    csv.row(row);
  }
  out.write("solve.csv", csv.str());
}

void scenario_mu_sweep(const ScenarioConfig& cfg, const Grid& grid, const ConstraintSet& c,
                       const ResourceField& m, OutDir& out) {
  out.write("m.json", resource_to_json(m).dump(2) + "\n");
  out.write("m.svg", heatmap_svg(m.field(), 0.0, c.kappa, "m"));
  Csv csv({"kappa", "m0", "mu", "N", "seed", "resource", "f", "excess", "residual_norm",
           "newton_iterations"});
  for (const double mu : cfg.mu_list) {
    const SteadySolution sol = solve_steady(grid, m, mu, cfg.steady);
    auto row = echo(cfg, mu);
    append(row, {cfg.resource.type, fd(sol.total_population),
                 fd(sol.total_population - c.m0), fd(sol.residual_norm),
                 std::to_string(sol.iterations)});
    csv.row(row);
  }
  out.write("mu_sweep.csv", csv.str());
}

void optim_rows(Csv& csv, const ScenarioConfig& cfg, double mu, const MultistartResult& ms,
                bool with_one_minus_bb) {
  for (std::size_t r = 0; r < ms.runs.size(); ++r) {
    const OptimRun& run = ms.runs[r];
    auto row = echo(cfg, mu);
    append(row, {std::to_string(r),
                 static_cast<int>(r) < cfg.n_starts ? "random" : "constant",
                 fd(run.final_f), fd(run.bang_bang)});
    if (with_one_minus_bb) append(row, {fd(1.0 - run.bang_bang)});
    append(row, {std::to_string(run.iterations), to_string(run.termination),
                 static_cast<int>(r) == ms.best ? "true" : "false"});
    csv.row(row);
  }
}

void scenario_optimize(const ScenarioConfig& cfg, const Grid& grid, const ConstraintSet& c,
                       OutDir& out) {
  const OptimOptions oo = runtime_optim(cfg);
  Csv csv({"kappa", "m0", "mu", "N", "seed", "start", "init", "final_f", "bang_bang",
           "iterations", "termination", "is_best"});
  for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
    const double mu = cfg.mu_list[i];
    const MultistartResult ms = multistart(grid, c, mu, cfg.n_starts, oo, cfg.threads);
    optim_rows(csv, cfg, mu, ms, false);
    const OptimRun& best = ms.runs[ms.best];
    out.write("best_" + std::to_string(i) + ".json",
              optim_run_to_json(best).dump(2) + "\n");
    out.write("best_m_" + std::to_string(i) + ".svg",
              heatmap_svg(best.final_m.field(), 0.0, c.kappa, "m mu=" + fd(mu)));
    const SteadySolution sol = solve_steady(grid, best.final_m, mu, cfg.steady);
    out.write("best_theta_" + std::to_string(i) + ".svg",
              field_svg(sol.theta, c.kappa, "theta mu=" + fd(mu)));
  }
  out.write("optimize.csv", csv.str());
}

void scenario_crenel_study(const ScenarioConfig& cfg, const Grid& grid,
                           const ConstraintSet& c, OutDir& out) {
  Csv study({"kappa", "m0", "mu", "N", "seed", "family", "parameter", "f"});
  Csv argmax({"kappa", "m0", "mu", "N", "seed", "best_family", "best_parameter", "best_f",
              "best_single_offset", "best_single_f", "best_double_split", "best_double_f"});
  for (const double mu : cfg.mu_list) {
    const CrenelScan scan = scan_crenels_1d(grid, c, mu, cfg.split_fractions, cfg.steady);
    for (const auto& r : scan.rows) {
      auto row = echo(cfg, mu);
      append(row, {r.family, fd(r.parameter), fd(r.f)});
      study.row(row);
    }
    const bool single_wins = scan.best_single_f >= scan.best_double_f;
    auto row = echo(cfg, mu);
    append(row, {single_wins ? "single" : "double",
                 fd(single_wins ? scan.best_single_offset : scan.best_double_split),
                 fd(std::max(scan.best_single_f, scan.best_double_f)),
                 fd(scan.best_single_offset), fd(scan.best_single_f),
                 fd(scan.best_double_split), fd(scan.best_double_f)});
    argmax.row(row);
  }
  out.write("crenel_study.csv", study.str());
  out.write("crenel_argmax.csv", argmax.str());
}

void scenario_fragmentation(const ScenarioConfig& cfg, const Grid& grid,
                            const ConstraintSet& c, OutDir& out) {
  const double margin_threshold = 1e-8;
  Csv csv({"kappa", "m0", "mu", "N", "seed", "best_single_offset", "best_single_f",
           "best_double_split", "best_double_f", "margin", "double_wins"});
  std::vector<double> witnesses;
  double max_margin = -std::numeric_limits<double>::infinity();
  double max_margin_mu = std::numeric_limits<double>::quiet_NaN();
  for (const double mu : cfg.mu_list) {
    const CrenelScan scan = scan_crenels_1d(grid, c, mu, cfg.split_fractions, cfg.steady);
    const double margin = scan.best_double_f - scan.best_single_f;
    if (margin > margin_threshold) witnesses.push_back(mu);
    if (margin > max_margin) {
      max_margin = margin;
      max_margin_mu = mu;
    }
    auto row = echo(cfg, mu);
    append(row, {fd(scan.best_single_offset), fd(scan.best_single_f),
                 fd(scan.best_double_split), fd(scan.best_double_f), fd(margin),
                 margin > margin_threshold ? "true" : "false"});
    csv.row(row);
  }
  json summary = {
      {"margin_threshold", margin_threshold},
      {"witness_mu_list", witnesses},
      {"first_witness_mu", witnesses.empty() ? json() : json(witnesses.front())},
      {"max_margin", max_margin},
      {"max_margin_mu", std::isnan(max_margin_mu) ? json() : json(max_margin_mu)},
      {"note",
       "margin = best double-crenel F minus best single-crenel F from the scan; a "
       "margin above the threshold witnesses fragmentation beating concentration at "
       "that diffusivity"}};
  out.write("fragmentation.csv", csv.str());
  out.write("fragmentation_summary.json", summary.dump(2) + "\n");
}

void scenario_mu_star(const ScenarioConfig& cfg, const Grid& grid, const ConstraintSet& c,
                      OutDir& out) {
  const OptimOptions oo = runtime_optim(cfg);
  const double bb_threshold = 1.0 - 2.0 / grid.total_cells();
  Csv csv({"kappa", "m0", "mu", "N", "seed", "start", "init", "final_f", "bang_bang",
           "one_minus_bang_bang", "iterations", "termination", "is_best"});
  std::vector<double> worst(cfg.mu_list.size());
  for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
    const double mu = cfg.mu_list[i];
    const MultistartResult ms = multistart(grid, c, mu, cfg.n_starts, oo, cfg.threads);
    optim_rows(csv, cfg, mu, ms, true);
    double w = 0.0;
    for (const OptimRun& run : ms.runs) w = std::max(w, 1.0 - run.bang_bang);
    worst[i] = w;
  }
  // Smallest grid mu from which on every start's winner is bang-bang.
  json mu_hat;
  for (std::size_t i = cfg.mu_list.size(); i-- > 0;) {
    if (1.0 - worst[i] >= bb_threshold)
      mu_hat = cfg.mu_list[i];
    else
      break;
  }
  json summary = {
      {"mu_hat", mu_hat},
      {"bang_bang_threshold", bb_threshold},
      {"mu_list", cfg.mu_list},
      {"per_mu_worst_one_minus_bang_bang", worst},
      {"note",
       "mu_hat is the smallest scanned mu above which every multistart winner is "
       "bang-bang on this grid; it is a finite-grid, finite-start indicator of the "
       "bang-bang threshold, not the threshold itself"}};
  out.write("mu_star.csv", csv.str());
  out.write("mu_star_summary.json", summary.dump(2) + "\n");
}

void scenario_concentration(const ScenarioConfig& cfg, const Grid& grid,
                            const ConstraintSet& c, OutDir& out) {
  const OptimOptions oo = runtime_optim(cfg);
  Csv csv({"kappa", "m0", "mu", "N", "seed", "final_f", "bang_bang", "defect",
           "l1_to_prev"});
  std::optional<ScalarField> prev;
  for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
    const double mu = cfg.mu_list[i];
    const MultistartResult ms = multistart(grid, c, mu, cfg.n_starts, oo, cfg.threads);
    const OptimRun& best = ms.runs[ms.best];
    const double defect = monotone_concentration_defect(best.final_m);
    auto row = echo(cfg, mu);
    append(row, {fd(best.final_f), fd(best.bang_bang), fd(defect),
                 prev ? fd(l1_distance(grid, best.final_m.field(), *prev)) : ""});
    csv.row(row);
    out.write("m_" + std::to_string(i) + ".svg",
              heatmap_svg(best.final_m.field(), 0.0, c.kappa, "m mu=" + fd(mu)));
    const SteadySolution sol = solve_steady(grid, best.final_m, mu, cfg.steady);
    out.write("theta_" + std::to_string(i) + ".svg",
              heatmap_svg(sol.theta, 0.0, c.kappa, "theta mu=" + fd(mu)));
    prev = best.final_m.field();
  }
  out.write("concentration.csv", csv.str());
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "solve",          "optimize",         "mu_sweep",
      "crenel_study_1d", "mu_star_estimate", "concentration_2d",
      "fragmentation_small_mu"};
  return names;
}

CrenelScan scan_crenels_1d(const Grid& grid, const ConstraintSet& c, double mu,
                           const std::vector<double>& split_fractions,
                           const SteadyOptions& steady) {
  if (grid.dim() != 1) throw Error("scan_crenels_1d: grid must be one-dimensional");
  const double ell = c.m0 / c.kappa;  // support length of any bang-bang field
  const double h = grid.spacing()[0];

  CrenelScan scan;
  scan.best_single_f = -std::numeric_limits<double>::infinity();
  scan.best_single_offset = 0.0;
  scan.best_double_f = -std::numeric_limits<double>::infinity();
  scan.best_double_split = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> offsets;
  for (int k = 0; k * h < 1.0 - ell - 1e-12; ++k) offsets.push_back(k * h);
  offsets.push_back(1.0 - ell);

  for (const double a : offsets) {
    const double b = std::min(a + ell, 1.0);
    const ResourceField m = make_crenel_1d(grid, c, {{a, b}});
    const double f = solve_steady(grid, m, mu, steady).total_population;
    scan.rows.push_back({"single", a, f});
    if (f > scan.best_single_f) {
      scan.best_single_f = f;
      scan.best_single_offset = a;
    }
  }

  // Symmetric equal-mass double crenels: s is the fraction of the empty
  // space placed in the central gap, the rest splits evenly between the two
  // outer gaps (s -> 1 pushes both plateaus onto the boundaries).
  for (const double s : split_fractions) {
    const double outer = 0.5 * (1.0 - s) * (1.0 - ell);
    const ResourceField m = make_crenel_1d(
        grid, c,
        {{outer, outer + 0.5 * ell}, {1.0 - outer - 0.5 * ell, 1.0 - outer}});
    const double f = solve_steady(grid, m, mu, steady).total_population;
    scan.rows.push_back({"double", s, f});
    if (f > scan.best_double_f) {
      scan.best_double_f = f;
      scan.best_double_split = s;
    }
  }
  return scan;
}

ScenarioConfig config_from_json(const json& j, const std::string& scenario_override) {
  if (!j.is_object()) bad("(root)", "config must be a JSON object");
  check_keys(j, "", {"scenario", "grid", "constraints", "mu", "mu_list", "resource",
                     "optimizer", "steady", "n_starts", "split_fractions", "seed",
                     "threads", "out_dir"});
  ScenarioConfig cfg;

  std::string from_file;
  if (j.contains("scenario")) from_file = require_string(j.at("scenario"), "scenario");
  if (!scenario_override.empty()) {
    if (!from_file.empty() && from_file != scenario_override)
      bad("scenario", "'" + from_file + "' does not match the requested scenario '" +
                          scenario_override + "'");
    cfg.scenario = scenario_override;
  } else {
    cfg.scenario = from_file;
  }
  if (cfg.scenario.empty())
    bad("scenario", "missing; name it in the config or on the command line");
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), cfg.scenario) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    bad("scenario", "unknown scenario '" + cfg.scenario + "' (known: " + known + ")");
  }

  if (cfg.scenario == "concentration_2d") cfg.dim = 2;  // scenario default
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) bad("grid", "must be an object");
    check_keys(g, "grid", {"dim", "cells"});
    if (g.contains("dim")) cfg.dim = require_int(g.at("dim"), "grid.dim");
    if (g.contains("cells")) {
      if (!g.at("cells").is_array()) bad("grid.cells", "must be an array of integers");
      cfg.cells.clear();
      for (const auto& e : g.at("cells")) cfg.cells.push_back(require_int(e, "grid.cells"));
    }
  }
  if (cfg.dim < 1) bad("grid.dim", "must be >= 1");
  if ((cfg.scenario == "crenel_study_1d" || cfg.scenario == "fragmentation_small_mu") &&
      cfg.dim != 1)
    bad("grid.dim", "scenario " + cfg.scenario + " is one-dimensional");
  if (cfg.scenario == "concentration_2d" && cfg.dim != 2)
    bad("grid.dim", "scenario concentration_2d is two-dimensional");
  if (cfg.cells.empty()) cfg.cells.assign(cfg.dim, cfg.dim == 1 ? 256 : 64);
  if (static_cast<int>(cfg.cells.size()) != cfg.dim)
    bad("grid.cells", "must list one cell count per axis");
  for (const int n : cfg.cells)
    if (n < 2) bad("grid.cells", "every axis needs at least 2 cells");

  if (j.contains("constraints")) {
    const json& cj = j.at("constraints");
    if (!cj.is_object()) bad("constraints", "must be an object");
    check_keys(cj, "constraints", {"kappa", "m0"});
    if (cj.contains("kappa")) cfg.kappa = require_number(cj.at("kappa"), "constraints.kappa");
    if (cj.contains("m0")) cfg.m0 = require_number(cj.at("m0"), "constraints.m0");
  }
  if (!(cfg.kappa > 0.0) || !std::isfinite(cfg.kappa))
    bad("constraints.kappa", "must be positive and finite");
  if (!(cfg.m0 > 0.0) || !(cfg.m0 < cfg.kappa))
    bad("constraints.m0", "must lie strictly between 0 and kappa");

  if (j.contains("mu") && j.contains("mu_list"))
    bad("mu", "give either mu or mu_list, not both");
  if (j.contains("mu")) {
    cfg.mu_list = {require_number(j.at("mu"), "mu")};
  } else if (j.contains("mu_list")) {
    if (!j.at("mu_list").is_array() || j.at("mu_list").empty())
      bad("mu_list", "must be a non-empty array of numbers");
    for (const auto& e : j.at("mu_list"))
      cfg.mu_list.push_back(require_number(e, "mu_list"));
  } else {
    cfg.mu_list = default_mu_list(cfg.scenario);
  }
  for (const double mu : cfg.mu_list)
    if (!(mu > 0.0) || !std::isfinite(mu))
      bad(j.contains("mu") ? "mu" : "mu_list", "diffusivities must be positive and finite");
  if ((cfg.scenario == "mu_star_estimate" || cfg.scenario == "concentration_2d") &&
      !strictly_increasing(cfg.mu_list))
    bad("mu_list", "must be strictly increasing for " + cfg.scenario);

  if (j.contains("seed")) cfg.seed = require_seed(j.at("seed"), "seed");
  if (j.contains("n_starts")) cfg.n_starts = require_int(j.at("n_starts"), "n_starts");
  if (cfg.n_starts < 1) bad("n_starts", "must be >= 1");
  if (j.contains("threads")) cfg.threads = require_int(j.at("threads"), "threads");
  if (cfg.threads < 1) bad("threads", "must be >= 1");
  if (j.contains("out_dir")) cfg.out_dir = require_string(j.at("out_dir"), "out_dir");
  if (cfg.out_dir.empty()) bad("out_dir", "must not be empty");

  if (j.contains("resource")) {
    const json& r = j.at("resource");
    if (!r.is_object()) bad("resource", "must be an object");
    check_keys(r, "resource", {"type", "intervals", "seed"});
    if (r.contains("type")) cfg.resource.type = require_string(r.at("type"), "resource.type");
    if (cfg.resource.type != "constant" && cfg.resource.type != "crenel" &&
        cfg.resource.type != "random")
      bad("resource.type", "must be one of constant, crenel, random");
    if (r.contains("intervals")) {
      if (!r.at("intervals").is_array()) bad("resource.intervals", "must be an array");
      for (const auto& e : r.at("intervals")) {
        if (!e.is_array() || e.size() != 2)
          bad("resource.intervals", "each interval must be a [a, b] pair");
        const double a = require_number(e[0], "resource.intervals");
        const double b = require_number(e[1], "resource.intervals");
        if (!(0.0 <= a) || !(a < b) || !(b <= 1.0))
          bad("resource.intervals", "each interval needs 0 <= a < b <= 1");
        cfg.resource.intervals.emplace_back(a, b);
      }
    }
    if (r.contains("seed")) cfg.resource.seed = require_seed(r.at("seed"), "resource.seed");
  }
  if (cfg.resource.type == "crenel" && cfg.resource.intervals.empty())
    cfg.resource.intervals = {{0.0, cfg.m0 / cfg.kappa}};

  if (j.contains("split_fractions")) {
    if (!j.at("split_fractions").is_array())
      bad("split_fractions", "must be an array of numbers");
    for (const auto& e : j.at("split_fractions")) {
      const double s = require_number(e, "split_fractions");
      if (!(s > 0.0) || !(s < 1.0)) bad("split_fractions", "fractions must lie in (0, 1)");
      cfg.split_fractions.push_back(s);
    }
  }
  if (cfg.split_fractions.empty())
    for (int i = 1; i <= 9; ++i) cfg.split_fractions.push_back(0.1 * i);

  if (j.contains("steady")) {
    const json& s = j.at("steady");
    if (!s.is_object()) bad("steady", "must be an object");
    check_keys(s, "steady", {"newton_tol", "max_newton_iters", "damping_min"});
    if (s.contains("newton_tol"))
      cfg.steady.newton_tol = require_number(s.at("newton_tol"), "steady.newton_tol");
    if (s.contains("max_newton_iters"))
      cfg.steady.max_newton_iters =
          require_int(s.at("max_newton_iters"), "steady.max_newton_iters");
    if (s.contains("damping_min"))
      cfg.steady.damping_min = require_number(s.at("damping_min"), "steady.damping_min");
  }
  if (!(cfg.steady.newton_tol > 0.0)) bad("steady.newton_tol", "must be positive");
  if (cfg.steady.max_newton_iters < 1) bad("steady.max_newton_iters", "must be >= 1");
  if (!(cfg.steady.damping_min > 0.0) || cfg.steady.damping_min > 1.0)
    bad("steady.damping_min", "must lie in (0, 1]");

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    if (!o.is_object()) bad("optimizer", "must be an object");
    check_keys(o, "optimizer",
               {"strategy", "step0", "max_iters", "f_rel_tol", "stall_window"});
    if (o.contains("strategy")) {
      const std::string s = require_string(o.at("strategy"), "optimizer.strategy");
      if (s == "projected_gradient")
        cfg.optim.strategy = Strategy::projected_gradient;
      else if (s == "thresholding")
        cfg.optim.strategy = Strategy::thresholding;
      else
        bad("optimizer.strategy", "must be projected_gradient or thresholding");
    }
    if (o.contains("step0"))
      cfg.optim.step0 = require_number(o.at("step0"), "optimizer.step0");
    if (o.contains("max_iters"))
      cfg.optim.max_iters = require_int(o.at("max_iters"), "optimizer.max_iters");
    if (o.contains("f_rel_tol"))
      cfg.optim.f_rel_tol = require_number(o.at("f_rel_tol"), "optimizer.f_rel_tol");
    if (o.contains("stall_window"))
      cfg.optim.stall_window = require_int(o.at("stall_window"), "optimizer.stall_window");
  }
  if (!(cfg.optim.step0 > 0.0)) bad("optimizer.step0", "must be positive");
  if (cfg.optim.max_iters < 1) bad("optimizer.max_iters", "must be >= 1");
  if (!(cfg.optim.f_rel_tol >= 0.0)) bad("optimizer.f_rel_tol", "must be >= 0");
  if (cfg.optim.stall_window < 1) bad("optimizer.stall_window", "must be >= 1");

  return cfg;
}

ScenarioConfig load_config(const std::string& path, const std::string& scenario_override) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw ConfigError("(file)", e.what());
  }
  return config_from_json(j, scenario_override);
}

void run_scenario(const ScenarioConfig& cfg) {
  const Grid grid = build_grid(cfg.dim, cfg.cells);
  const ConstraintSet c(cfg.kappa, cfg.m0);

  // Everything that can be rejected without solving is validated before the
  // output directory is touched.
  std::optional<ResourceField> fixed;
  if (cfg.scenario == "solve" || cfg.scenario == "mu_sweep") {
    try {
      fixed = build_resource(grid, c, cfg.resource);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("resource", e.what());
    }
  }

  OutDir out;
  out.dir = fs::path(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) throw Error("cannot create output directory '" + cfg.out_dir + "'");

  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.scenario == "solve")
    scenario_solve(cfg, grid, c, *fixed, out);
  else if (cfg.scenario == "mu_sweep")
    scenario_mu_sweep(cfg, grid, c, *fixed, out);
  else if (cfg.scenario == "optimize")
    scenario_optimize(cfg, grid, c, out);
  else if (cfg.scenario == "crenel_study_1d")
    scenario_crenel_study(cfg, grid, c, out);
  else if (cfg.scenario == "fragmentation_small_mu")
    scenario_fragmentation(cfg, grid, c, out);
  else if (cfg.scenario == "mu_star_estimate")
    scenario_mu_star(cfg, grid, c, out);
  else if (cfg.scenario == "concentration_2d")
    scenario_concentration(cfg, grid, c, out);
  else
    throw ConfigError("scenario", "unknown scenario '" + cfg.scenario + "'");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const json manifest = {{"tool", "habopt"},
                         {"version", kVersion},
                         {"manifest_version", kManifestVersion},
                         {"scenario", cfg.scenario},
                         {"config", config_to_json(cfg)},
                         {"wall_time_seconds", wall},
                         {"outputs", out.written}};
  write_text_file((out.dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace habopt
