#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "habopt/errors.hpp"

namespace habopt {

/// Cell-centered uniform tensor-product grid on the unit box (0,1)^n.
/// Cell centers sit at ((i_d + 1/2) * h_d); the flat cell index is row-major
/// over the multi-index with the last axis varying fastest.
class Grid {
 public:
  Grid(int dim, std::vector<int> cells_per_axis);

  int dim() const { return dim_; }
  const std::vector<int>& cells_per_axis() const { return cells_; }
  const std::vector<double>& spacing() const { return spacing_; }
  double cell_volume() const { return cell_volume_; }
  int total_cells() const { return total_cells_; }

  /// Flat-index stride of one step along `axis`.
  int stride(int axis) const { return strides_[axis]; }
  /// Multi-index component of flat cell `cell` along `axis`.
  int coord(int cell, int axis) const {
    return (cell / strides_[axis]) % cells_[axis];
  }
  /// Coordinate of the cell center along `axis`.
  double center(int cell, int axis) const {
    return (coord(cell, axis) + 0.5) * spacing_[axis];
  }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && cells_ == other.cells_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_;
  std::vector<int> cells_;
  std::vector<double> spacing_;
  std::vector<int> strides_;
  double cell_volume_;
  int total_cells_;
};

/// Builds a grid, rejecting dim < 1 and axes with fewer than 2 cells
/// (a 1-cell axis makes the zero-flux stencil degenerate).
Grid build_grid(int dim, std::vector<int> cells_per_axis);

/// One real value per grid cell. Value semantics, immutable by convention
/// after construction; all operations below are pure functions.
class ScalarField {
 public:
  explicit ScalarField(Grid grid, double fill = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Throws GridMismatchError unless `f` lives on `grid`.
void require_same_grid(const Grid& grid, const ScalarField& f,
                       const char* what);

/// Discrete Laplacian with homogeneous Neumann (zero-flux) boundaries:
/// second-order central differences per axis with mirrored ghost cells.
ScalarField laplacian_apply(const Grid& grid, const ScalarField& f);

/// Same stencil applied to f - mean(f). Mathematically identical (the
/// Laplacian annihilates constants) but avoids the cancellation noise the
/// direct evaluation picks up on near-constant fields; used for residuals.
ScalarField laplacian_apply_deviation(const Grid& grid, const ScalarField& f);

/// Midpoint quadrature: cell_volume * sum. Since |Omega| = 1 this is also
/// the mean of f.
double integrate(const Grid& grid, const ScalarField& f);

/// L2 inner product under the same quadrature: cell_volume * sum(a*b).
double inner(const Grid& grid, const ScalarField& a, const ScalarField& b);

double inf_norm(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

/// Mirror image of f along `axis` (i_d -> N_d - 1 - i_d).
ScalarField reflect(const ScalarField& f, int axis);

/// Factorized solver for (mu*L + diag(c)) x = b with L the Neumann
/// Laplacian above. Reusable across right-hand sides (the matrix is
/// assembled and factorized once). Thread-safe for concurrent solves.
class ShiftedSolver {
 public:
  ShiftedSolver(const Grid& grid, double mu, const ScalarField& c);

  /// Solves for x, with iterative refinement until the residual meets
  /// 1e-10 * max(1, |b|_inf), or failing that the rounding floor of a
  /// correctly rounded exact solution (~eps * |A|_inf * |x|_inf). Throws
  /// SingularSystemError when neither is reached.
  ScalarField solve(const ScalarField& b) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// One-shot convenience wrapper around ShiftedSolver.
ScalarField solve_shifted(const Grid& grid, double mu, const ScalarField& c,
                          const ScalarField& b);

}  // namespace habopt
