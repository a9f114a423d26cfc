#include "habopt/resource.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace habopt {

ConstraintSet::ConstraintSet(double kappa_, double m0_) : kappa(kappa_), m0(m0_) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw Error("constraints: kappa must be positive");
  if (!(m0 > 0.0 && m0 < kappa))
    throw Error("constraints: m0 must lie in (0, kappa)");
}

namespace {

constexpr double kBoundSlack = 1e-12;
constexpr double kMeanSlack = 1e-10;

double mean_of(const ScalarField& f) {
  return integrate(f.grid(), f) /
         (f.grid().cell_volume() * f.grid().total_cells());
}

}  // namespace

ResourceField::ResourceField(ScalarField field, ConstraintSet constraints)
    : field_(std::move(field)), constraints_(constraints) {
  for (double v : field_.values()) {
    if (v < -kBoundSlack || v > constraints_.kappa + kBoundSlack)
      throw Error("resource: value " + std::to_string(v) +
                  " outside [0, kappa]");
  }
  const double mean = mean_of(field_);
  if (std::abs(mean - constraints_.m0) > kMeanSlack)
    throw Error("resource: mean " + std::to_string(mean) +
                " does not match m0 = " + std::to_string(constraints_.m0));
}

ResourceField project_admissible(const ScalarField& f, const ConstraintSet& c) {
  const Grid& grid = f.grid();
  const int total = grid.total_cells();

  auto clamped_mean = [&](double t) {
    double sum = 0.0;
    for (double v : f.values()) sum += std::clamp(v + t, 0.0, c.kappa);
    return sum / total;
  };

  double t = 0.0;
  if (std::abs(clamped_mean(0.0) - c.m0) > 1e-13) {
    // mean(clamp(f + t)) is continuous and non-decreasing in t, sweeping
    // (0, kappa); bracket and bisect on the mean defect.
    double lo = -max_value(f);
    double hi = c.kappa - min_value(f);
    for (int it = 0; it < 200; ++it) {
      t = 0.5 * (lo + hi);
      const double g = clamped_mean(t) - c.m0;
      if (std::abs(g) <= 1e-13 || hi - lo < 1e-16 * std::max(1.0, std::abs(t)))
        break;
      (g < 0 ? lo : hi) = t;
    }
  }

  std::vector<double> out(total);
  for (int i = 0; i < total; ++i) out[i] = std::clamp(f[i] + t, 0.0, c.kappa);
  return ResourceField(ScalarField(grid, std::move(out)), c);
}

ResourceField make_crenel_1d(const Grid& grid, const ConstraintSet& c,
                             const std::vector<Interval>& intervals) {
  if (grid.dim() != 1) throw Error("make_crenel_1d: grid must be 1D");
  if (intervals.empty()) throw Error("make_crenel_1d: need at least one interval");
  for (const auto& [a, b] : intervals) {
    if (!(a >= 0.0 && a < b && b <= 1.0))
      throw Error("make_crenel_1d: interval must satisfy 0 <= a < b <= 1");
  }
  std::vector<Interval> sorted(intervals);
  std::sort(sorted.begin(), sorted.end());
  double total_length = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    if (k > 0 && sorted[k].first < sorted[k - 1].second - 1e-15)
      throw Error("make_crenel_1d: intervals overlap");
    total_length += sorted[k].second - sorted[k].first;
  }

  const int n = grid.cells_per_axis()[0];
  const double h = grid.spacing()[0];
  const int ends = 2 * static_cast<int>(sorted.size());
  if (std::abs(c.kappa * total_length - c.m0) > c.kappa * h * ends + 1e-12)
    throw Error("make_crenel_1d: interval mass inconsistent with m0");

  // Exact per-cell coverage of the interval union.
  std::vector<double> v(n, 0.0);
  for (const auto& [a, b] : sorted) {
    const int lo = std::clamp(static_cast<int>(std::floor(a / h)), 0, n - 1);
    const int hi = std::clamp(static_cast<int>(std::ceil(b / h)) - 1, 0, n - 1);
    for (int i = lo; i <= hi; ++i) {
      const double ov = std::min(b, (i + 1) * h) - std::max(a, i * h);
      if (ov > 0.0) v[i] = std::min(c.kappa, v[i] + c.kappa * ov / h);
    }
  }

  // Settle the mean exactly on the interval-end cells (then, if those fill
  // up, on the cells just outside each end), visiting ends in order.
  double mass = 0.0;
  for (double x : v) mass += x * h;
  double err = c.m0 - mass;
  std::vector<int> adjust;
  for (const auto& [a, b] : sorted) {
    const int lo = std::clamp(static_cast<int>(std::floor(a / h)), 0, n - 1);
    const int hi = std::clamp(static_cast<int>(std::ceil(b / h)) - 1, 0, n - 1);
    for (int j : {hi, lo, hi + 1, lo - 1}) {
      if (j >= 0 && j < n &&
          std::find(adjust.begin(), adjust.end(), j) == adjust.end())
        adjust.push_back(j);
    }
  }
  for (int j : adjust) {
    if (std::abs(err) <= 1e-14) break;
    const double room = err > 0 ? c.kappa - v[j] : -v[j];
    const double take = err > 0 ? std::min(err / h, room)
                                : std::max(err / h, room);
    v[j] += take;
    err -= take * h;
  }
  if (std::abs(err) > 1e-13)
    throw Error("make_crenel_1d: cannot place required mass on interval ends");

  return ResourceField(ScalarField(grid, std::move(v)), c);
}

ResourceField make_random(const Grid& grid, const ConstraintSet& c,
                          std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<double> raw(grid.total_cells());
  for (double& x : raw) {
    // top 53 bits -> uniform double in [0,1); engine output is fully
    // specified by the standard, so replay is bit-identical everywhere
    x = c.kappa * ((eng() >> 11) * 0x1.0p-53);
  }
  return project_admissible(ScalarField(grid, std::move(raw)), c);
}

double bang_bang_fraction(const ResourceField& m, std::optional<double> tol_opt) {
  const double kappa = m.constraints().kappa;
  const double tol = tol_opt.value_or(1e-3 * kappa);
  if (!(tol > 0.0 && tol < 0.5 * kappa))
    throw Error("bang_bang_fraction: tol must lie in (0, kappa/2)");
  int hits = 0;
  for (double v : m.field().values())
    if (std::abs(v) <= tol || std::abs(v - kappa) <= tol) ++hits;
  return static_cast<double>(hits) / m.grid().total_cells();
}

int fragment_count_1d(const ResourceField& m) {
  if (m.grid().dim() != 1) throw Error("fragment_count_1d: grid must be 1D");
  const double half = 0.5 * m.constraints().kappa;
  int runs = 0;
  bool in_run = false;
  for (double v : m.field().values()) {
    const bool high = v > half;
    if (high && !in_run) ++runs;
    in_run = high;
  }
  return runs;
}

double monotone_concentration_defect(const ResourceField& m,
                                     std::optional<double> threshold_opt) {
  const Grid& grid = m.grid();
  const double thr = threshold_opt.value_or(0.5 * m.constraints().kappa);
  std::vector<char> e(grid.total_cells());
  for (int i = 0; i < grid.total_cells(); ++i)
    e[i] = m.field()[i] > thr ? 1 : 0;

  int total_lines = 0;
  int failures = 0;
  for (int d = 0; d < grid.dim(); ++d) {
    const int s = grid.stride(d);
    const int n = grid.cells_per_axis()[d];
    int non_monotone = 0, inc = 0, dec = 0;
    for (int i = 0; i < grid.total_cells(); ++i) {
      if ((i / s) % n != 0) continue;  // not a line start
      bool up = false, down = false;
      for (int k = 0; k + 1 < n; ++k) {
        const char a = e[i + k * s];
        const char b = e[i + (k + 1) * s];
        if (a < b) up = true;
        if (a > b) down = true;
      }
      ++total_lines;
      if (up && down) ++non_monotone;
      else if (up) ++inc;
      else if (down) ++dec;
      // constant lines agree with either orientation
    }
    // one orientation per axis, by majority; dissenting lines count as failed
    failures += non_monotone + std::min(inc, dec);
  }
  return total_lines == 0 ? 0.0 : static_cast<double>(failures) / total_lines;
}

double distance_to_boundary_crenel(const ResourceField& m) {
  if (m.grid().dim() != 1)
    throw Error("distance_to_boundary_crenel: grid must be 1D");
  const ConstraintSet& c = m.constraints();
  const double len = c.m0 / c.kappa;
  const ResourceField left = make_crenel_1d(m.grid(), c, {{0.0, len}});
  const ResourceField right = make_crenel_1d(m.grid(), c, {{1.0 - len, 1.0}});
  const double vol = m.grid().cell_volume();
  double dl = 0.0, dr = 0.0;
  for (int i = 0; i < m.grid().total_cells(); ++i) {
    dl += std::abs(m.field()[i] - left.field()[i]);
    dr += std::abs(m.field()[i] - right.field()[i]);
  }
  return vol * std::min(dl, dr);
}

}  // namespace habopt
