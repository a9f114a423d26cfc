#include "habopt/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "habopt/errors.hpp"
#include "habopt/evolution.hpp"

namespace habopt {

namespace {

// R(theta) = mu*L(theta) + (m - theta).*theta, with the Laplacian applied to
// theta - mean(theta) so the norm is not swamped by cancellation at large mu.
ScalarField residual_field(const Grid& grid, const ResourceField& m, double mu,
                           const ScalarField& theta) {
  ScalarField r = laplacian_apply_deviation(grid, theta);
  const int nc = grid.total_cells();
  for (int i = 0; i < nc; ++i) {
    const double th = theta[i];
    r[i] = mu * r[i] + (m.field()[i] - th) * th;
  }
  return r;
}

}  // namespace

double residual_norm(const Grid& grid, const ResourceField& m, double mu,
                     const ScalarField& theta) {
  require_same_grid(grid, m.field(), "residual_norm resource");
  require_same_grid(grid, theta, "residual_norm state");
  return inf_norm(residual_field(grid, m, mu, theta));
}

SteadySolution solve_steady(const Grid& grid, const ResourceField& m, double mu,
                            const SteadyOptions& opts,
                            const std::optional<ScalarField>& init) {
  require_same_grid(grid, m.field(), "solve_steady resource");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error("solve_steady: mu must be positive");
  if (!(opts.newton_tol > 0.0)) throw Error("solve_steady: newton_tol must be positive");
  if (opts.max_newton_iters < 1) throw Error("solve_steady: max_newton_iters must be >= 1");
  if (!(opts.damping_min > 0.0) || opts.damping_min > 1.0)
    throw Error("solve_steady: damping_min must lie in (0, 1]");

  ScalarField theta(grid, m.constraints().m0);
  if (init) {
    require_same_grid(grid, *init, "solve_steady initial guess");
    if (min_value(*init) <= 0.0)
      throw Error("solve_steady: initial guess must be strictly positive");
    theta = *init;
  }

  const int nc = grid.total_cells();

  // The residual is evaluated in floating point, so it cannot be resolved
  // below roughly eps * mu * sum(1/h^2) * |theta|; stop at that floor when it
  // exceeds the requested tolerance instead of stalling against rounding noise.
  double inv_h2_sum = 0.0;
  for (int a = 0; a < grid.dim(); ++a)
    inv_h2_sum += 1.0 / (grid.spacing()[a] * grid.spacing()[a]);
  const double m_norm = inf_norm(m.field());
  const auto effective_tol = [&](const ScalarField& th) {
    const double th_norm = inf_norm(th);
    const double scale = mu * inv_h2_sum + m_norm + 2.0 * th_norm;
    const double floor_tol =
        50.0 * std::numeric_limits<double>::epsilon() * scale * th_norm;
    return std::max(opts.newton_tol, floor_tol);
  };

  ScalarField r = residual_field(grid, m, mu, theta);
  double rn = inf_norm(r);
  std::vector<double> history{rn};
  int iters = 0;
  int stall_count = 0;
  bool fallback_used = false;

  while (rn > effective_tol(theta)) {
    if (iters >= opts.max_newton_iters)
      throw ConvergenceError("steady solver: residual " + std::to_string(rn) +
                                 " above tolerance after max iterations",
                             history);
    ++iters;

    ScalarField c(grid);
    for (int i = 0; i < nc; ++i) c[i] = m.field()[i] - 2.0 * theta[i];
    const ShiftedSolver newton(grid, mu, c);
    ScalarField rhs(grid);
    for (int i = 0; i < nc; ++i) rhs[i] = -r[i];
    const ScalarField delta = newton.solve(rhs);

    // Halve the step until the residual drops and theta stays positive.
    bool accepted = false;
    for (double alpha = 1.0; alpha >= opts.damping_min; alpha *= 0.5) {
      ScalarField cand(grid);
      for (int i = 0; i < nc; ++i) cand[i] = theta[i] + alpha * delta[i];
      if (min_value(cand) <= 0.0) continue;
      ScalarField rc = residual_field(grid, m, mu, cand);
      const double rcn = inf_norm(rc);
      if (rcn < rn) {
        theta = std::move(cand);
        r = std::move(rc);
        rn = rcn;
        history.push_back(rn);
        accepted = true;
        break;
      }
    }
    if (accepted) {
      stall_count = 0;
      continue;
    }

    if (++stall_count < 2) continue;  // deterministic retry confirms the stall
    if (fallback_used)
      throw ConvergenceError(
          "steady solver: stalled at damping floor after evolution restart", history);
    // Restart from the time-dependent solver, which converges globally to
    // the positive steady state; horizon T = 50/mu.
    EvolutionOptions eo;
    eo.dt = 0.25 / m.constraints().kappa;
    eo.max_steps = std::max(200, static_cast<int>(std::ceil(50.0 / mu / eo.dt)));
    eo.stop_tol = 1e-13;
    theta = evolve(grid, m, mu, theta, eo).u;
    fallback_used = true;
    stall_count = 0;
    r = residual_field(grid, m, mu, theta);
    rn = inf_norm(r);
    history.push_back(rn);
  }

  const double f = integrate(grid, theta);
  return {std::move(theta), mu, rn, iters, f};
}

}  // namespace habopt
