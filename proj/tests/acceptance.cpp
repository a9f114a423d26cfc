// Acceptance battery: one self-contained check per claim the tool is sold on.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
// --skip-2d omits the long 2D concentration study; --only-2d runs just it.
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "habopt/adjoint.hpp"
#include "habopt/evolution.hpp"
#include "habopt/experiments.hpp"
#include "habopt/io.hpp"
#include "habopt/optimize.hpp"
#include "habopt/steady.hpp"

using namespace habopt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

// Mean-zero direction supported on cells where m is clear of both bounds.
ScalarField interior_direction(const Grid& g, const ResourceField& m,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double margin = 0.05;
  ScalarField d(g);
  int active = 0;
  for (int i = 0; i < g.total_cells(); ++i) {
    const double v = m.field()[i];
    const bool interior = v > margin && v < m.constraints().kappa - margin;
    d[i] = interior ? dist(rng) : 0.0;
    active += interior ? 1 : 0;
  }
  const double mean = integrate(g, d) * g.total_cells();
  for (int i = 0; i < g.total_cells(); ++i)
    if (d[i] != 0.0) d[i] -= mean / active;
  return d;
}

double max_gap(const ScalarField& a, const ScalarField& b) {
  double gap = 0.0;
  for (int i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

Outcome constant_exactness() {
  double worst_f = 0.0, worst_theta = 0.0;
  for (double m0 : {0.25, 0.4, 0.5}) {
    for (double mu : {0.01, 1.0, 100.0}) {
      for (int n : {64, 256}) {
        const Grid g = build_grid(1, {n});
        const ResourceField m(ScalarField(g, m0), ConstraintSet(1.0, m0));
        const SteadySolution sol = solve_steady(g, m, mu);
        worst_f = std::max(worst_f, std::abs(sol.total_population - m0));
        worst_theta = std::max(worst_theta, max_gap(sol.theta, ScalarField(g, m0)));
      }
    }
  }
  return {worst_f <= 1e-12 && worst_theta <= 1e-12,
          "max|F-m0| = " + sci(worst_f) + ", max|theta-m0| = " + sci(worst_theta)};
}

Outcome cross_oracle() {
  const Grid g = build_grid(1, {256});
  const ConstraintSet c(1.0, 0.4);
  double worst = 0.0;
  std::string worst_pair = "-";
  for (const char* kind : {"constant", "crenel", "random"}) {
    for (double mu : {0.01, 0.1, 1.0, 10.0}) {
      ResourceField m = std::strcmp(kind, "constant") == 0
                            ? ResourceField(ScalarField(g, c.m0), c)
                            : (std::strcmp(kind, "crenel") == 0
                                   ? make_crenel_1d(g, c, {{0.0, 0.4}})
                                   : make_random(g, c, 7));
      const SteadySolution sol = solve_steady(g, m, mu);
      EvolutionOptions eo;
      eo.stop_tol = 1e-12;
      const EvolveResult ev = evolve(g, m, mu, ScalarField(g, c.m0), eo);
      if (!ev.stationary)
        return {false, std::string("evolution not stationary for ") + kind +
                           " at mu = " + sci(mu)};
      const double gap = max_gap(sol.theta, ev.u);
      if (gap > worst) {
        worst = gap;
        worst_pair = std::string(kind) + " mu=" + sci(mu);
      }
    }
  }
  return {worst <= 1e-6, "12 pairs, worst gap = " + sci(worst) + " (" + worst_pair + ")"};
}

Outcome population_excess() {
  const Grid g = build_grid(1, {256});
  const ConstraintSet c(1.0, 0.4);
  double worst_excess = 1e300;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double f = solve_steady(g, make_random(g, c, seed), 1.0).total_population;
    worst_excess = std::min(worst_excess, f - c.m0);
  }
  const bool random_ok = worst_excess >= -1e-12;

  double worst_crenel = 1e300;
  const std::vector<std::vector<Interval>> crenels = {
      {{0.0, 0.4}}, {{0.6, 1.0}}, {{0.3, 0.7}}, {{0.0, 0.2}, {0.8, 1.0}}};
  for (const auto& iv : crenels) {
    const double f = solve_steady(g, make_crenel_1d(g, c, iv), 1.0).total_population;
    worst_crenel = std::min(worst_crenel, f - c.m0);
  }
  return {random_ok && worst_crenel >= 1e-6,
          "min excess: random " + sci(worst_excess) + ", crenel " + sci(worst_crenel)};
}

Outcome gradient_check() {
  const Grid g = build_grid(1, {128});
  const ConstraintSet c(1.0, 0.4);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ResourceField m = make_random(g, c, 1000 + seed);
    const ScalarField d = interior_direction(g, m, 2000 + seed);
    worst = std::max(worst, fd_validate(g, m, 1.0, d, 1e-4));
  }
  return {worst <= 1e-5, "20 pairs, worst relative error = " + sci(worst)};
}

Outcome bang_bang_emergence() {
  const Grid g = build_grid(1, {256});
  const ConstraintSet c(1.0, 0.4);
  const MultistartResult ms = multistart(g, c, 10.0, 10);
  double worst = 1.0;
  for (const OptimRun& run : ms.runs) worst = std::min(worst, run.bang_bang);
  return {worst >= 1.0 - 2.0 / 256,
          "11 winners, min bang_bang_fraction = " + sci(worst) +
              " (threshold " + sci(1.0 - 2.0 / 256) + ")"};
}

Outcome boundary_crenel_optimum() {
  const Grid g = build_grid(1, {64});
  const ConstraintSet c(1.0, 0.4);
  const double mu = 10.0;  // the flattening sweep puts the large-mu regime at O(1)+
  const MultistartResult ms = multistart(g, c, mu, 10);
  double worst_dist = 0.0;
  for (const OptimRun& run : ms.runs)
    worst_dist = std::max(worst_dist, distance_to_boundary_crenel(run.final_m));
  const CrenelScan scan = scan_crenels_1d(g, c, mu, {});
  const double f_gap = std::abs(ms.runs[ms.best].final_f - scan.best_single_f);
  return {worst_dist <= 4.0 / 64 && f_gap <= 1e-8,
          "max L1 distance = " + sci(worst_dist) + " (cap " + sci(4.0 / 64) +
              "), |F_opt - F_scan| = " + sci(f_gap)};
}

Outcome fragmentation_small_mu() {
  const Grid g = build_grid(1, {256});
  const ConstraintSet c(1.0, 0.4);
  double best_margin = -1e300, witness = 0.0;
  for (double mu : {1e-3, 3.162e-3, 1e-2, 3.162e-2, 1e-1}) {
    const CrenelScan scan = scan_crenels_1d(
        g, c, mu, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    const double margin = scan.best_double_f - scan.best_single_f;
    if (margin > best_margin) {
      best_margin = margin;
      witness = mu;
    }
  }
  return {best_margin > 1e-8,
          "best double-vs-single margin = " + sci(best_margin) +
              " at mu = " + sci(witness)};
}

Outcome concentration_2d() {
  const Grid g = build_grid(2, {64, 64});
  const ConstraintSet c(1.0, 0.4);
  const std::vector<double> mus = {0.3, 1.0, 3.0, 10.0};
  std::vector<double> defects;
  std::ostringstream detail;
  for (double mu : mus) {
    const MultistartResult ms = multistart(g, c, mu, 4);
    const double d = monotone_concentration_defect(ms.runs[ms.best].final_m);
    defects.push_back(d);
    detail << (defects.size() > 1 ? ", " : "") << "mu=" << mu << ": " << sci(d);
  }
  const bool pass = defects.back() <= 0.05 && defects.back() <= defects.front();
  return {pass, detail.str()};
}

Outcome large_mu_flattening() {
  const Grid g = build_grid(1, {256});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField m = make_crenel_1d(g, c, {{0.0, 0.4}});
  double prev = 1e300, last = 0.0;
  bool decreasing = true;
  for (double mu : {1.0, 10.0, 100.0, 1000.0}) {
    last = std::abs(solve_steady(g, m, mu).total_population - c.m0);
    decreasing = decreasing && last < prev;
    prev = last;
  }
  return {decreasing && last < 1e-3,
          std::string(decreasing ? "|F-m0| strictly decreasing" : "NOT decreasing") +
              ", gap at mu=1000: " + sci(last)};
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "habopt_acceptance_det";
  fs::remove_all(base);
  const auto run_pair = [&](const nlohmann::json& body, const std::string& scenario,
                            const std::string& csv) {
    std::vector<std::string> texts;
    for (int rep = 0; rep < 2; ++rep) {
      nlohmann::json j = body;
      j["scenario"] = scenario;
      j["out_dir"] = (base / (scenario + std::to_string(rep))).string();
      run_scenario(config_from_json(j));
      texts.push_back(read_text_file((base / (scenario + std::to_string(rep)) / csv).string()));
    }
    return texts[0] == texts[1];
  };
  const bool sweep_ok = run_pair(
      {{"grid", {{"cells", {64}}}}, {"mu_list", {0.5, 5.0}}, {"seed", 3}},
      "mu_sweep", "mu_sweep.csv");
  const bool optim_ok = run_pair(
      {{"grid", {{"cells", {64}}}}, {"mu", 1.0}, {"n_starts", 2}, {"seed", 3}},
      "optimize", "optimize.csv");
  fs::remove_all(base);
  return {sweep_ok && optim_ok,
          std::string("mu_sweep ") + (sweep_ok ? "identical" : "DIFFERS") +
              ", optimize " + (optim_ok ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_2d = false, only_2d = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--skip-2d") == 0) skip_2d = true;
    else if (std::strcmp(argv[i], "--only-2d") == 0) only_2d = true;
    else {
      std::cerr << "usage: acceptance [--skip-2d | --only-2d]\n";
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "constant-resource exactness", constant_exactness},
      {2, "steady/evolution cross-oracle", cross_oracle},
      {3, "population excess over m0", population_excess},
      {4, "adjoint gradient vs finite differences", gradient_check},
      {5, "bang-bang multistart winners", bang_bang_emergence},
      {6, "1d boundary-crenel optimum", boundary_crenel_optimum},
      {7, "fragmentation advantage at small mu", fragmentation_small_mu},
      {8, "2d concentration trend", concentration_2d},
      {9, "large-mu population flattening", large_mu_flattening},
      {10, "byte-identical scenario reruns", determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const bool skip = (c.id == 8 && skip_2d) || (only_2d && c.id != 8);
    if (skip) {
      std::printf("[%2d] SKIP  %s\n", c.id, c.name);
      std::fflush(stdout);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%2d] %s  %s: %s (%.1fs)\n", c.id, out.pass ? "PASS" : "FAIL",
                c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  if (failures > 0) std::printf("%d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
