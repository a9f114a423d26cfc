#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "habopt/grid.hpp"

namespace habopt {

/// Pointwise cap kappa and prescribed mean m0 of the admissible set
/// { 0 <= m <= kappa, mean(m) = m0 }. Requires 0 < m0 < kappa.
struct ConstraintSet {
  ConstraintSet(double kappa, double m0);

  double kappa;
  double m0;
};

/// A resource distribution together with the constraints it satisfies.
/// Construction validates the bounds (slack 1e-12) and the mean (1e-10).
class ResourceField {
 public:
  ResourceField(ScalarField field, ConstraintSet constraints);

  const ScalarField& field() const { return field_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const Grid& grid() const { return field_.grid(); }

 private:
  ScalarField field_;
  ConstraintSet constraints_;
};

/// L2 projection onto the admissible set: clamp(f + t, 0, kappa) with the
/// scalar shift t found by bisection until the mean matches m0 to 1e-12.
/// Idempotent on admissible inputs.
ResourceField project_admissible(const ScalarField& f, const ConstraintSet& c);

using Interval = std::pair<double, double>;

/// Bang-bang 1D profile supported on the given disjoint intervals: full
/// cells are set to kappa and at most one boundary cell per interval end
/// takes a fractional value so the mean is exactly m0. The intervals'
/// total length must match m0/kappa up to one cell width per interval end.
ResourceField make_crenel_1d(const Grid& grid, const ConstraintSet& c,
                             const std::vector<Interval>& intervals);

/// I.i.d. uniform values in [0, kappa] from a seeded mt19937_64 (doubles
/// drawn as (x >> 11) * 2^-53), then projected onto the admissible set.
/// The same seed replays bit-identically.
ResourceField make_random(const Grid& grid, const ConstraintSet& c,
                          std::uint64_t seed);

/// Fraction of cells within tol of 0 or of kappa. Default tol: 1e-3*kappa;
/// must lie in (0, kappa/2).
double bang_bang_fraction(const ResourceField& m,
                          std::optional<double> tol = std::nullopt);

/// Number of maximal runs of consecutive cells with value > kappa/2 (1D).
int fragment_count_1d(const ResourceField& m);

/// Thresholds m into a 0/1 set and scans every grid line along every axis.
/// A line fails when its 0/1 sequence is non-monotone, or when it is
/// monotone but disagrees with the axis orientation chosen by majority
/// vote over that axis's non-constant lines. Returns the failing fraction
/// of (axis, line) pairs; 0 means the set is monotone in every variable.
/// Default threshold: kappa/2.
double monotone_concentration_defect(const ResourceField& m,
                                     std::optional<double> threshold = std::nullopt);

/// Discrete L1 distance from m to the nearer of the two boundary crenels
/// kappa*chi_(0, m0/kappa) and kappa*chi_(1 - m0/kappa, 1) (1D).
double distance_to_boundary_crenel(const ResourceField& m);

}  // namespace habopt
