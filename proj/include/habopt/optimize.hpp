#pragma once

#include <cstdint>
#include <vector>

#include "habopt/adjoint.hpp"
#include "habopt/resource.hpp"
#include "habopt/steady.hpp"

namespace habopt {

enum class Strategy { projected_gradient, thresholding };
enum class Termination { converged, max_iters, stalled };

struct OptimOptions {
  Strategy strategy = Strategy::thresholding;
  double step0 = 1.0;       ///< initial projected-gradient step
  int max_iters = 500;
  double f_rel_tol = 1e-10;  ///< F-stagnation threshold over stall_window
  int stall_window = 10;
  std::uint64_t seed = 0;    ///< seeds the random restarts in multistart
  SteadyOptions steady;      ///< inner solver options
};

struct OptimRun {
  ResourceField final_m;
  std::vector<double> f_history;  ///< F per accepted iterate, non-decreasing
  double final_f;
  double bang_bang;  ///< bang_bang_fraction of final_m at the default tol
  int iterations;
  Termination termination;
};

const char* to_string(Termination t);
const char* to_string(Strategy s);

/// Maximize F_mu over the bathtub set from an admissible initial field.
/// Thresholding proposes the bang-bang maximizer of the linearized objective
/// each iteration and falls back to a projected-gradient step with
/// backtracking when that does not increase F; every accepted iterate
/// strictly increases F, so f_history is monotone.
OptimRun optimize(const Grid& grid, const ConstraintSet& c, double mu,
                  const ResourceField& init, const OptimOptions& opts = {});

/// Bang-bang field maximizing <g, m> over the bathtub set: kappa on the
/// cells with the largest g (ties broken by ascending cell index), one
/// fractional cell so the mean is exactly m0, zero elsewhere.
ResourceField threshold_to_volume(const ScalarField& g, const ConstraintSet& c);

struct MultistartResult {
  std::vector<OptimRun> runs;  ///< n_starts seeded random inits, then the constant init
  int best;                    ///< argmax of final_f (lowest index on ties)
};

MultistartResult multistart(const Grid& grid, const ConstraintSet& c, double mu,
                            int n_starts, const OptimOptions& opts = {}, int threads = 1);

/// Deterministic per-start seed stream (splitmix64 over the master seed).
std::uint64_t child_seed(std::uint64_t master, int index);

}  // namespace habopt
