#pragma once

#include <optional>

#include "habopt/resource.hpp"

namespace habopt {

struct SteadyOptions {
  double newton_tol = 1e-10;  ///< stopping threshold on |residual|_inf
  int max_newton_iters = 50;
  double damping_min = 1e-4;  ///< smallest line-search step before declaring a stall
};

/// Positive steady state of mu*L(theta) + (m - theta).*theta = 0 together
/// with solver diagnostics and the total population integral(theta).
struct SteadySolution {
  ScalarField theta;
  double mu;
  double residual_norm;
  int iterations;
  double total_population;
};

/// Damped Newton iteration from theta = m0 (or `init` when given): each step
/// solves (mu*L + diag(m - 2 theta)) delta = -residual and halves the step
/// until the residual norm drops and theta stays strictly positive. If the
/// damping floor is hit twice the iterate is restarted from the evolution
/// solver run over the horizon T = 50/mu, which is globally convergent to
/// the positive state; a second stall after that is a hard failure.
SteadySolution solve_steady(const Grid& grid, const ResourceField& m, double mu,
                            const SteadyOptions& opts = {},
                            const std::optional<ScalarField>& init = std::nullopt);

/// |mu*L(theta) + (m - theta).*theta|_inf, evaluated in deviation form so
/// the reported norm is not dominated by cancellation noise at large mu.
double residual_norm(const Grid& grid, const ResourceField& m, double mu,
                     const ScalarField& theta);

}  // namespace habopt
