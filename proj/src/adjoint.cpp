#include "habopt/adjoint.hpp"

#include <cmath>
#include <utility>

#include "habopt/errors.hpp"

namespace habopt {

GradientBundle solve_adjoint(const Grid& grid, const ResourceField& m, double mu,
                             const SteadySolution& sol) {
  require_same_grid(grid, m.field(), "solve_adjoint resource");
  require_same_grid(grid, sol.theta, "solve_adjoint state");
  if (sol.mu != mu) throw Error("solve_adjoint: mu does not match the steady solution");
  if (!(sol.residual_norm <= 1e-8))
    throw Error("solve_adjoint: steady solution is not converged");

  const int nc = grid.total_cells();
  ScalarField c(grid);
  for (int i = 0; i < nc; ++i) c[i] = m.field()[i] - 2.0 * sol.theta[i];

  ScalarField p = solve_shifted(grid, mu, c, ScalarField(grid, -1.0));

  ScalarField grad(grid);
  for (int i = 0; i < nc; ++i) grad[i] = p[i] * sol.theta[i];
  return {std::move(p), std::move(grad), sol};
}

double fd_validate(const Grid& grid, const ResourceField& m, double mu,
                   const ScalarField& direction, double h) {
  require_same_grid(grid, m.field(), "fd_validate resource");
  require_same_grid(grid, direction, "fd_validate direction");
  if (!(h > 0.0)) throw Error("fd_validate: step h must be positive");
  if (std::abs(integrate(grid, direction)) > 1e-10)
    throw Error("fd_validate: direction must have zero mean");

  const ConstraintSet& c = m.constraints();
  const int nc = grid.total_cells();
  ScalarField plus(grid), minus(grid);
  for (int i = 0; i < nc; ++i) {
    plus[i] = m.field()[i] + h * direction[i];
    minus[i] = m.field()[i] - h * direction[i];
  }
  const double slack = 1e-12;
  if (min_value(plus) < -slack || max_value(plus) > c.kappa + slack ||
      min_value(minus) < -slack || max_value(minus) > c.kappa + slack)
    throw Error("fd_validate: perturbed field leaves [0, kappa]");

  // Tight inner tolerance: the FD quotient divides the solver error by 2h.
  SteadyOptions tight;
  tight.newton_tol = 1e-11;

  const SteadySolution sol = solve_steady(grid, m, mu, tight);
  const GradientBundle bundle = solve_adjoint(grid, m, mu, sol);
  const double lhs = inner(grid, bundle.grad, direction);

  const double f_plus =
      solve_steady(grid, project_admissible(plus, c), mu, tight).total_population;
  const double f_minus =
      solve_steady(grid, project_admissible(minus, c), mu, tight).total_population;
  const double fd = (f_plus - f_minus) / (2.0 * h);

  const double err = std::abs(lhs - fd);
  return std::abs(lhs) <= 1e-14 ? err : err / std::abs(lhs);
}

}  // namespace habopt
