#include "habopt/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>
#include <utility>

#include "habopt/errors.hpp"

namespace habopt {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::projected_gradient: return "projected_gradient";
    case Strategy::thresholding: return "thresholding";
  }
  return "unknown";
}

std::uint64_t child_seed(std::uint64_t master, int index) {
  std::uint64_t x = master;
  std::uint64_t z = 0;
  for (int i = 0; i <= index; ++i) {
    x += 0x9e3779b97f4a7c15ULL;
    z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

ResourceField threshold_to_volume(const ScalarField& g, const ConstraintSet& c) {
  const Grid& grid = g.grid();
  const int nc = grid.total_cells();
  for (int i = 0; i < nc; ++i)
    if (!std::isfinite(g[i])) throw Error("threshold_to_volume: scores must be finite");

  std::vector<int> idx(nc);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&g](int a, int b) {
    if (g[a] != g[b]) return g[a] > g[b];
    return a < b;  // deterministic tie-break by cell index
  });

  // k full cells at kappa plus one fractional cell so the sum is exactly
  // m0 * total_cells (mean m0 under the uniform quadrature).
  const double quota = c.m0 * nc / c.kappa;
  int k = static_cast<int>(std::floor(quota));
  if (k > nc - 1) k = nc - 1;  // m0 < kappa keeps quota < nc; guard rounding
  const double partial = c.m0 * nc - c.kappa * k;

  ScalarField out(grid, 0.0);
  for (int j = 0; j < k; ++j) out[idx[j]] = c.kappa;
  if (partial > 1e-12) out[idx[k]] = partial;
  return {std::move(out), c};
}

namespace {

bool same_constraints(const ConstraintSet& a, const ConstraintSet& b) {
  return a.kappa == b.kappa && a.m0 == b.m0;
}

SteadySolution solve_inner(const Grid& grid, const ResourceField& m, double mu,
                           const SteadyOptions& steady,
                           const std::optional<ScalarField>& warm) {
  if (warm) {
    try {
      return solve_steady(grid, m, mu, steady, warm);
    } catch (const ConvergenceError&) {
      // retry cold below; the constant start is in the stable basin
    }
  }
  return solve_steady(grid, m, mu, steady);
}

}  // namespace

OptimRun optimize(const Grid& grid, const ConstraintSet& c, double mu,
                  const ResourceField& init, const OptimOptions& opts) {
  require_same_grid(grid, init.field(), "optimize initial field");
  if (!same_constraints(c, init.constraints()))
    throw Error("optimize: initial field carries different constraints");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error("optimize: mu must be positive");
  if (!(opts.step0 > 0.0)) throw Error("optimize: step0 must be positive");
  if (opts.max_iters < 1) throw Error("optimize: max_iters must be >= 1");
  if (opts.stall_window < 1) throw Error("optimize: stall_window must be >= 1");

  const int nc = grid.total_cells();
  const double step_floor = 1e-8;

  ResourceField m = init;
  SteadySolution sol = solve_inner(grid, m, mu, opts.steady, std::nullopt);
  double f = sol.total_population;
  std::vector<double> history{f};
  double alpha = opts.step0;
  Termination term = Termination::max_iters;
  int iters = 0;

  for (int k = 0; k < opts.max_iters; ++k) {
    ++iters;
    const GradientBundle bundle = solve_adjoint(grid, m, mu, sol);
    bool accepted = false;

    if (opts.strategy == Strategy::thresholding) {
      ResourceField cand = threshold_to_volume(bundle.grad, c);
      if (cand.field().values() == m.field().values()) {
        // Fixed point of the linearized subproblem: first-order optimal.
        term = Termination::converged;
        break;
      }
      SteadySolution cs = solve_inner(grid, cand, mu, opts.steady, sol.theta);
      if (cs.total_population > f) {
        m = std::move(cand);
        sol = std::move(cs);
        f = sol.total_population;
        history.push_back(f);
        accepted = true;
      }
    }

    if (!accepted) {
      // Projected-gradient ascent step, backtracking on F itself.
      while (alpha >= step_floor) {
        ScalarField trial(grid);
        for (int i = 0; i < nc; ++i) trial[i] = m.field()[i] + alpha * bundle.grad[i];
        ResourceField cand = project_admissible(trial, c);
        if (cand.field().values() != m.field().values()) {
          SteadySolution cs = solve_inner(grid, cand, mu, opts.steady, sol.theta);
          if (cs.total_population > f) {
            m = std::move(cand);
            sol = std::move(cs);
            f = sol.total_population;
            history.push_back(f);
            accepted = true;
            alpha *= 2.0;
            break;
          }
        }
        alpha *= 0.5;
      }
    }

    if (!accepted) {
      term = Termination::stalled;
      break;
    }
    if (static_cast<int>(history.size()) > opts.stall_window) {
      const double f_then = history[history.size() - 1 - opts.stall_window];
      if (f - f_then <= opts.f_rel_tol * std::max(1.0, std::abs(f))) {
        term = Termination::converged;
        break;
      }
    }
  }

  const double bb = bang_bang_fraction(m);
  return {std::move(m), std::move(history), f, bb, iters, term};
}

MultistartResult multistart(const Grid& grid, const ConstraintSet& c, double mu,
                            int n_starts, const OptimOptions& opts, int threads) {
  if (n_starts < 1) throw Error("multistart: n_starts must be >= 1");
  const int total = n_starts + 1;

  std::vector<ResourceField> inits;
  inits.reserve(total);
  for (int i = 0; i < n_starts; ++i)
    inits.push_back(make_random(grid, c, child_seed(opts.seed, i)));
  inits.emplace_back(ScalarField(grid, c.m0), c);  // the constant start

  std::vector<std::optional<OptimRun>> slots(total);
  if (threads < 2) {
    for (int i = 0; i < total; ++i) slots[i] = optimize(grid, c, mu, inits[i], opts);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= total) return;
        try {
          slots[i] = optimize(grid, c, mu, inits[i], opts);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(threads, total);
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  MultistartResult result;
  result.runs.reserve(total);
  for (auto& slot : slots) result.runs.push_back(std::move(*slot));
  result.best = 0;
  for (int i = 1; i < total; ++i)
    if (result.runs[i].final_f > result.runs[result.best].final_f) result.best = i;
  return result;
}

}  // namespace habopt
