#include "habopt/evolution.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "habopt/errors.hpp"
#include "habopt/io.hpp"

namespace habopt {

EvolveResult evolve(const Grid& grid, const ResourceField& m, double mu,
                    const ScalarField& u0, const EvolutionOptions& opts) {
  require_same_grid(grid, m.field(), "evolve resource");
  require_same_grid(grid, u0, "evolve initial state");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error("evolve: mu must be positive");
  if (opts.max_steps < 1) throw Error("evolve: max_steps must be >= 1");
  if (!(opts.stop_tol > 0.0)) throw Error("evolve: stop_tol must be positive");

  const double kappa = m.constraints().kappa;
  if (opts.dt < 0.0 || !std::isfinite(opts.dt))
    throw Error("evolve: dt must be nonnegative (0 selects the default)");
  const double dt = opts.dt > 0.0 ? opts.dt : 0.25 / kappa;
  if (dt > 0.5 / kappa * (1.0 + 1e-12))
    throw Error("evolve: dt exceeds the reaction stability bound 0.5/kappa");
  if (min_value(u0) < 0.0) throw Error("evolve: initial state must be nonnegative");
  if (max_value(u0) == 0.0) throw Error("evolve: initial state must not be identically zero");

  // (I - dt*mu*L) u_{n+1} = u_n + dt*u_n.*(m - u_n), rewritten for the
  // shifted solver as (mu*L - I/dt) u_{n+1} = -rhs/dt.
  const ShiftedSolver solver(grid, mu, ScalarField(grid, -1.0 / dt));

  std::ofstream dump;
  const bool dumping = !opts.dump_path.empty() && opts.dump_every > 0;
  if (dumping) {
    dump.open(opts.dump_path);
    if (!dump) throw Error("evolve: cannot open dump file '" + opts.dump_path + "'");
    dump << field_to_json(u0).dump() << '\n';
  }

  const int nc = grid.total_cells();
  ScalarField u = u0;
  ScalarField b(grid);
  for (int step = 1; step <= opts.max_steps; ++step) {
    for (int i = 0; i < nc; ++i) {
      const double ui = u[i];
      b[i] = -(ui + dt * ui * (m.field()[i] - ui)) / dt;
    }
    ScalarField next = solver.solve(b);
    if (min_value(next) < -1e-13)
      throw Error("evolve: negative density produced; reduce dt below 0.5/kappa");

    double rate = 0.0;
    for (int i = 0; i < nc; ++i) rate = std::max(rate, std::abs(next[i] - u[i]));
    rate /= dt;
    u = std::move(next);

    if (dumping && step % opts.dump_every == 0) dump << field_to_json(u).dump() << '\n';
    if (rate < opts.stop_tol) return {std::move(u), step, true};
  }
  return {std::move(u), opts.max_steps, false};
}

}  // namespace habopt
