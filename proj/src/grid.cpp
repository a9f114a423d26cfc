#include "habopt/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace habopt {

Grid::Grid(int dim, std::vector<int> cells_per_axis) : dim_(dim) {
  if (dim < 1) throw Error("grid: dim must be >= 1, got " + std::to_string(dim));
  if (static_cast<int>(cells_per_axis.size()) != dim)
    throw Error("grid: cells_per_axis must have one entry per axis");
  for (int n : cells_per_axis) {
    if (n < 2)
      throw Error("grid: every axis needs at least 2 cells, got " +
                  std::to_string(n));
  }
  cells_ = std::move(cells_per_axis);
  spacing_.resize(dim_);
  for (int d = 0; d < dim_; ++d) spacing_[d] = 1.0 / cells_[d];
  // last axis varies fastest
  strides_.assign(dim_, 1);
  for (int d = dim_ - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * cells_[d + 1];
  total_cells_ = strides_[0] * cells_[0];
  cell_volume_ = 1.0;
  for (double h : spacing_) cell_volume_ *= h;
}

Grid build_grid(int dim, std::vector<int> cells_per_axis) {
  return Grid(dim, std::move(cells_per_axis));
}

ScalarField::ScalarField(Grid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.total_cells(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.total_cells())
    throw Error("field: value count does not match grid (" +
                std::to_string(values_.size()) + " vs " +
                std::to_string(grid_.total_cells()) + ")");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("field: non-finite value");
}

void require_same_grid(const Grid& grid, const ScalarField& f,
                       const char* what) {
  if (f.grid() != grid)
    throw GridMismatchError(std::string(what) + ": field lives on a different grid");
}

namespace {

// Shared stencil loop. The per-axis term is written as (vl + vr - 2*vc) so
// that mirroring an axis swaps vl and vr without changing the rounding,
// keeping laplacian_apply exactly reflection-equivariant.
void add_laplacian(const Grid& grid, const std::vector<double>& v,
                   std::vector<double>& out) {
  const int total = grid.total_cells();
  for (int d = 0; d < grid.dim(); ++d) {
    const int s = grid.stride(d);
    const int n = grid.cells_per_axis()[d];
    const double h = grid.spacing()[d];
    const double inv_h2 = 1.0 / (h * h);
    for (int i = 0; i < total; ++i) {
      const int c = (i / s) % n;
      const double vc = v[i];
      const double vl = c > 0 ? v[i - s] : vc;
      const double vr = c + 1 < n ? v[i + s] : vc;
      out[i] += (vl + vr - 2.0 * vc) * inv_h2;
    }
  }
}

}  // namespace

ScalarField laplacian_apply(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f, "laplacian_apply");
  ScalarField out(grid, 0.0);
  add_laplacian(grid, f.values(), out.values());
  return out;
}

ScalarField laplacian_apply_deviation(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f, "laplacian_apply_deviation");
  const double mean = integrate(grid, f) / (grid.cell_volume() * grid.total_cells());
  std::vector<double> w(f.values());
  for (double& x : w) x -= mean;
  ScalarField out(grid, 0.0);
  add_laplacian(grid, w, out.values());
  return out;
}

double integrate(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f, "integrate");
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return grid.cell_volume() * sum;
}

double inner(const Grid& grid, const ScalarField& a, const ScalarField& b) {
  require_same_grid(grid, a, "inner");
  require_same_grid(grid, b, "inner");
  double sum = 0.0;
  for (int i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return grid.cell_volume() * sum;
}

double inf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const ScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : f.values()) m = std::min(m, v);
  return m;
}

double max_value(const ScalarField& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : f.values()) m = std::max(m, v);
  return m;
}

ScalarField reflect(const ScalarField& f, int axis) {
  const Grid& grid = f.grid();
  if (axis < 0 || axis >= grid.dim())
    throw Error("reflect: axis out of range");
  const int s = grid.stride(axis);
  const int n = grid.cells_per_axis()[axis];
  ScalarField out(grid, 0.0);
  for (int i = 0; i < grid.total_cells(); ++i) {
    const int c = (i / s) % n;
    const int j = i + (n - 1 - 2 * c) * s;
    out[j] = f[i];
  }
  return out;
}

struct ShiftedSolver::Impl {
  Grid grid;
  double mu;
  ScalarField c;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double row_norm = 0.0;  // |A|_inf
  bool factorization_ok = false;

  Impl(const Grid& g, double mu_, const ScalarField& c_)
      : grid(g), mu(mu_), c(c_) {}
};

ShiftedSolver::ShiftedSolver(const Grid& grid, double mu, const ScalarField& c) {
  if (!(mu > 0.0)) throw Error("solve_shifted: mu must be positive");
  require_same_grid(grid, c, "solve_shifted");

  auto impl = std::make_shared<Impl>(grid, mu, c);
  const int total = grid.total_cells();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(total) * (2 * grid.dim() + 1));
  std::vector<double> diag(total, 0.0);
  for (int i = 0; i < total; ++i) diag[i] = c[i];
  for (int d = 0; d < grid.dim(); ++d) {
    const int s = grid.stride(d);
    const int n = grid.cells_per_axis()[d];
    const double w = mu / (grid.spacing()[d] * grid.spacing()[d]);
    for (int i = 0; i < total; ++i) {
      const int cd = (i / s) % n;
      if (cd > 0) {
        trip.emplace_back(i, i - s, w);
        diag[i] -= w;
      }
      if (cd + 1 < n) {
        trip.emplace_back(i, i + s, w);
        diag[i] -= w;
      }
    }
  }
  for (int i = 0; i < total; ++i) trip.emplace_back(i, i, diag[i]);

  impl->A.resize(total, total);
  impl->A.setFromTriplets(trip.begin(), trip.end());
  impl->A.makeCompressed();

  for (int k = 0; k < impl->A.outerSize(); ++k) {
    double row = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(impl->A, k); it; ++it)
      row += std::abs(it.value());
    impl->row_norm = std::max(impl->row_norm, row);
  }

  impl->lu.compute(impl->A);
  impl->factorization_ok = impl->lu.info() == Eigen::Success;
  impl_ = std::move(impl);
}

ScalarField ShiftedSolver::solve(const ScalarField& b) const {
  const Impl& impl = *impl_;
  require_same_grid(impl.grid, b, "solve_shifted");
  if (!impl.factorization_ok)
    throw SingularSystemError("solve_shifted: factorization failed (singular shifted operator)");

  const int total = impl.grid.total_cells();
  Eigen::Map<const Eigen::VectorXd> bv(b.values().data(), total);
  Eigen::VectorXd x = impl.lu.solve(bv);
  if (impl.lu.info() != Eigen::Success || !x.allFinite())
    throw SingularSystemError("solve_shifted: solve failed (singular shifted operator)");

  const double b_norm = bv.lpNorm<Eigen::Infinity>();
  const double strict_tol = 1e-10 * std::max(1.0, b_norm);

  auto residual_norm = [&](const Eigen::VectorXd& xv) {
    // Evaluate mu*L*(x - mean x) + c.*x - b by deviations: L annihilates
    // constants, and this avoids the cancellation noise of the assembled
    // matvec on near-constant solutions.
    const double mean = xv.sum() / total;
    std::vector<double> w(total), lap(total, 0.0);
    for (int i = 0; i < total; ++i) w[i] = xv[i] - mean;
    add_laplacian(impl.grid, w, lap);
    double r = 0.0;
    for (int i = 0; i < total; ++i)
      r = std::max(r, std::abs(impl.mu * lap[i] + impl.c[i] * xv[i] - b[i]));
    return r;
  };

  double res = residual_norm(x);
  for (int pass = 0; pass < 3 && res > strict_tol; ++pass) {
    Eigen::VectorXd r = bv - impl.A * x;
    Eigen::VectorXd dx = impl.lu.solve(r);
    if (impl.lu.info() != Eigen::Success || !dx.allFinite()) break;
    Eigen::VectorXd x_new = x + dx;
    const double res_new = residual_norm(x_new);
    if (res_new >= res) break;
    x.swap(x_new);
    res = res_new;
  }

  const double x_norm = x.lpNorm<Eigen::Infinity>();
  if (x_norm > 1e13 * std::max(1.0, b_norm))
    throw SingularSystemError(
        "solve_shifted: solution blow-up, shifted operator is singular or near-singular");
  // Rounding floor: even the exactly rounded solution carries a residual of
  // order eps*|A|*|x|, so a direct solve cannot be held below it.
  const double floor_tol =
      50.0 * std::numeric_limits<double>::epsilon() * impl.row_norm * std::max(1.0, x_norm);
  if (res > std::max(strict_tol, floor_tol))
    throw SingularSystemError(
        "solve_shifted: residual " + std::to_string(res) +
        " exceeds tolerance; system is singular or near-singular");

  return ScalarField(impl.grid, std::vector<double>(x.data(), x.data() + total));
}

ScalarField solve_shifted(const Grid& grid, double mu, const ScalarField& c,
                          const ScalarField& b) {
  return ShiftedSolver(grid, mu, c).solve(b);
}

}  // namespace habopt
