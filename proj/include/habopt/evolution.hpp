#pragma once

#include <string>

#include "habopt/resource.hpp"

namespace habopt {

struct EvolutionOptions {
  double dt = 0.0;          ///< time step; 0 means the default 0.25/kappa
  double stop_tol = 1e-11;  ///< stationarity threshold on |u_{n+1} - u_n|_inf / dt
  int max_steps = 200000;
  std::string dump_path;    ///< when set, trajectory states go here as JSON lines
  int dump_every = 0;       ///< dump period in steps; 0 disables dumping
};

struct EvolveResult {
  ScalarField u;
  int steps;
  bool stationary;
};

/// Semi-implicit time stepping of du/dt = mu*Lu + u(m - u): diffusion is
/// implicit (one factorization, reused every step), the logistic reaction is
/// explicit. Requires u0 >= 0 and not identically zero, and dt <= 0.5/kappa
/// so the explicit reaction update stays monotone. Stops when the update
/// rate |u_{n+1} - u_n|_inf / dt falls below stop_tol.
EvolveResult evolve(const Grid& grid, const ResourceField& m, double mu,
                    const ScalarField& u0, const EvolutionOptions& opts = {});

}  // namespace habopt
