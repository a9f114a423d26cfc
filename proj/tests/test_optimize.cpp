#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "habopt/optimize.hpp"

using namespace habopt;

namespace {

ScalarField random_scores(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (int i = 0; i < g.total_cells(); ++i) f[i] = dist(rng);
  return f;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("threshold_to_volume fills the top cells and one fractional cell") {
  const Grid g = build_grid(1, {16});
  const ConstraintSet c(1.0, 0.4);
  ScalarField score(g);
  for (int i = 0; i < 16; ++i) score[i] = i;  // strictly increasing
  const ResourceField m = threshold_to_volume(score, c);
  for (int i = 10; i < 16; ++i) CHECK(m.field()[i] == 1.0);  // top six cells
  CHECK(m.field()[9] == doctest::Approx(0.4).epsilon(1e-14));
  for (int i = 0; i < 9; ++i) CHECK(m.field()[i] == 0.0);
  CHECK(integrate(g, m.field()) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("score ties break by ascending cell index") {
  const Grid g = build_grid(1, {16});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField m = threshold_to_volume(ScalarField(g, 7.0), c);
  for (int i = 0; i < 6; ++i) CHECK(m.field()[i] == 1.0);
  CHECK(m.field()[6] == doctest::Approx(0.4).epsilon(1e-14));
  for (int i = 7; i < 16; ++i) CHECK(m.field()[i] == 0.0);
}

TEST_CASE("thresholding maximizes the linear functional over the bathtub set") {
  const Grid g = build_grid(1, {64});
  const ConstraintSet c(1.0, 0.4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ScalarField score = random_scores(g, 500 + seed);
    const ResourceField best = threshold_to_volume(score, c);
    const double top = inner(g, score, best.field());
    for (std::uint64_t s2 = 0; s2 < 10; ++s2) {
      const ResourceField other = make_random(g, c, 900 + 10 * seed + s2);
      CHECK(inner(g, score, other.field()) <= top + 1e-12);
    }
  }
  CHECK_THROWS_AS(
      threshold_to_volume(ScalarField(g, std::nan("")), c), Error);
}

TEST_CASE("a constant start lands on the boundary crenel at mu = 10") {
  const Grid g = build_grid(1, {64});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init(ScalarField(g, 0.4), c);
  const OptimRun run = optimize(g, c, 10.0, init);
  CHECK(run.termination == Termination::converged);
  CHECK(run.iterations <= 3);
  CHECK(run.bang_bang >= 1.0 - 2.0 / 64);
  CHECK(distance_to_boundary_crenel(run.final_m) <= 4.0 / 64);
  CHECK(run.final_f > 0.4);
}

TEST_CASE("accepted iterates strictly increase F") {
  const Grid g = build_grid(1, {64});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init = make_random(g, c, 77);
  const OptimRun run = optimize(g, c, 1.0, init);
  REQUIRE(run.f_history.size() >= 2);
  for (std::size_t i = 1; i < run.f_history.size(); ++i)
    CHECK(run.f_history[i] > run.f_history[i - 1]);
  CHECK(run.final_f == run.f_history.back());
  CHECK(run.termination != Termination::max_iters);
}

TEST_CASE("projected gradient alone also improves a random start") {
  const Grid g = build_grid(1, {48});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init = make_random(g, c, 12);
  OptimOptions opts;
  opts.strategy = Strategy::projected_gradient;
  opts.max_iters = 40;
  const OptimRun run = optimize(g, c, 1.0, init, opts);
  CHECK(run.final_f > run.f_history.front());
  for (std::size_t i = 1; i < run.f_history.size(); ++i)
    CHECK(run.f_history[i] > run.f_history[i - 1]);
}

TEST_CASE("no single-cell swap improves the converged optimum") {
  const Grid g = build_grid(1, {32});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init(ScalarField(g, 0.4), c);
  const double mu = 1.0;
  const OptimRun run = optimize(g, c, mu, init);
  REQUIRE(run.termination == Termination::converged);
  const double f_star = run.final_f;

  std::vector<int> full, empty;
  for (int i = 0; i < 32; ++i) {
    if (run.final_m.field()[i] == c.kappa) full.push_back(i);
    if (run.final_m.field()[i] == 0.0) empty.push_back(i);
  }
  REQUIRE(!full.empty());
  REQUIRE(!empty.empty());
  for (int i : full) {
    for (int j : empty) {
      ScalarField swapped = run.final_m.field();
      swapped[i] = 0.0;
      swapped[j] = c.kappa;
      const ResourceField cand(swapped, c);
      CHECK(solve_steady(g, cand, mu).total_population <= f_star + 1e-7);
    }
  }
}

TEST_CASE("mirrored starts reach the same objective value") {
  const Grid g = build_grid(1, {64});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init = make_random(g, c, 5);
  const ResourceField mirrored(reflect(init.field(), 0), c);
  const OptimRun a = optimize(g, c, 2.0, init);
  const OptimRun b = optimize(g, c, 2.0, mirrored);
  CHECK(std::abs(a.final_f - b.final_f) <= 1e-8);
}

TEST_CASE("optimize is deterministic") {
  const Grid g = build_grid(1, {48});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init = make_random(g, c, 33);
  const OptimRun a = optimize(g, c, 1.0, init);
  const OptimRun b = optimize(g, c, 1.0, init);
  CHECK(a.f_history == b.f_history);
  CHECK(a.final_m.field().values() == b.final_m.field().values());
}

TEST_CASE("child seeds form a deterministic, collision-free stream") {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t s = child_seed(42, i);
    CHECK(s == child_seed(42, i));
    seen.insert(s);
  }
  CHECK(seen.size() == 100);
  CHECK(child_seed(42, 0) != child_seed(43, 0));
}

TEST_CASE("multistart runs n_starts random starts plus the constant start") {
  const Grid g = build_grid(1, {32});
  const ConstraintSet c(1.0, 0.4);
  const MultistartResult r = multistart(g, c, 1.0, 2);
  CHECK(r.runs.size() == 3);
  CHECK(r.best >= 0);
  CHECK(r.best < 3);
  for (const OptimRun& run : r.runs)
    CHECK(run.final_f <= r.runs[r.best].final_f);
}

TEST_CASE("threaded multistart matches the sequential result bitwise") {
  const Grid g = build_grid(1, {32});
  const ConstraintSet c(1.0, 0.4);
  const MultistartResult seq = multistart(g, c, 1.0, 3, {}, 1);
  const MultistartResult par = multistart(g, c, 1.0, 3, {}, 2);
  REQUIRE(seq.runs.size() == par.runs.size());
  CHECK(seq.best == par.best);
  for (std::size_t i = 0; i < seq.runs.size(); ++i) {
    CHECK(seq.runs[i].final_f == par.runs[i].final_f);
    CHECK(seq.runs[i].final_m.field().values() ==
          par.runs[i].final_m.field().values());
  }
}

TEST_CASE("option validation") {
  const Grid g = build_grid(1, {16});
  const ConstraintSet c(1.0, 0.4);
  const ResourceField init(ScalarField(g, 0.4), c);
  OptimOptions bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(optimize(g, c, 1.0, init, bad), Error);
  bad = OptimOptions{};
  bad.step0 = 0.0;
  CHECK_THROWS_AS(optimize(g, c, 1.0, init, bad), Error);
  CHECK_THROWS_AS(optimize(g, c, -1.0, init), Error);
  CHECK_THROWS_AS(
      optimize(g, ConstraintSet(1.0, 0.5), 1.0, init), Error);
  CHECK_THROWS_AS(multistart(g, c, 1.0, 0), Error);
}

}  // TEST_SUITE("optimize")
