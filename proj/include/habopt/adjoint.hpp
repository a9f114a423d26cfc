#pragma once

#include "habopt/resource.hpp"
#include "habopt/steady.hpp"

namespace habopt {

/// Adjoint state p solving (mu*L + diag(m - 2 theta)) p = -1 and the L2
/// gradient of the total population, grad = p .* theta (cell-wise).
struct GradientBundle {
  ScalarField p;
  ScalarField grad;
  SteadySolution theta_ref;
};

/// The linearized operator equals the Newton matrix at convergence, so the
/// adjoint solve reuses the same shifted kernel with c = m - 2*theta.
GradientBundle solve_adjoint(const Grid& grid, const ResourceField& m, double mu,
                             const SteadySolution& sol);

/// Central finite-difference check of the adjoint gradient along `direction`
/// (mean zero, m +/- h*direction admissible). Returns the relative error
/// |<grad,d> - (F(m+hd) - F(m-hd))/(2h)| / |<grad,d>|, or the absolute error
/// when |<grad,d>| <= 1e-14 (flat point, relative error is meaningless).
double fd_validate(const Grid& grid, const ResourceField& m, double mu,
                   const ScalarField& direction, double h);

}  // namespace habopt
