#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "curvecert/core_types.hpp"
#include "curvecert/rng.hpp"

using namespace curvecert;

namespace {

SampledCurve scalar_curve(const TimeGrid& grid, double (*f)(double)) {
  std::vector<Vec> values;
  values.reserve(static_cast<std::size_t>(grid.n_nodes()));
  for (int i = 0; i <= grid.n_steps; ++i) {
    values.push_back({f(grid.node(i))});
  }
  return SampledCurve(grid, std::move(values));
}

}  // namespace

TEST_CASE("clamp_time maps points to the nearest interval point") {
  const TimeInterval interval{0.0, 1.0, 0.5};
  CHECK(clamp_time(0.7, interval) == 0.7);
  CHECK(clamp_time(-3.0, interval) == 0.0);
  CHECK(clamp_time(2.5, interval) == 1.0);
}

TEST_CASE("clamp_time is idempotent") {
  const TimeInterval interval{-2.0, 3.5, 0.0};
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const double t = uniform_in(rng, -20.0, 20.0);
    const double c = clamp_time(t, interval);
    CHECK(clamp_time(c, interval) == c);
  }
}

TEST_CASE("grid construction snaps t0 onto a node") {
  const TimeGrid g = make_grid({-0.5, 0.5, 0.0}, 1000);
  CHECK(g.n_steps == 1000);
  CHECK(g.i0 == 500);
  CHECK(g.node(g.i0) == g.t0());
  CHECK(g.snap_error <= 1e-13);
  CHECK(g.node(0) == -0.5);
}

TEST_CASE("degenerate interval gives the single-node grid") {
  const TimeGrid g = make_grid({0.3, 0.3, 0.3}, 50);
  CHECK(g.n_steps == 0);
  CHECK(g.n_nodes() == 1);
  CHECK(g.t0() == 0.3);
}

TEST_CASE("invalid intervals and grids are rejected") {
  CHECK_THROWS_AS(make_grid({1.0, 0.0, 0.5}, 10), DomainError);
  CHECK_THROWS_AS(make_grid({0.0, 1.0, 2.0}, 10), DomainError);
  CHECK_THROWS_AS(make_grid({0.0, 1.0, 0.5}, 0), DomainError);
  CHECK_THROWS_AS(make_subgrid(0.0, -1.0, 10, 0), DomainError);
}

TEST_CASE("sup_distance examples") {
  const TimeGrid g = make_grid({0.0, 1.0, 0.0}, 10);
  const SampledCurve f = scalar_curve(g, [](double t) { return t; });
  CHECK(sup_distance(f, f) == 0.0);

  const SampledCurve zero = SampledCurve::constant(g, {0.0});
  const SampledCurve offset = SampledCurve::constant(g, {-2.5});
  CHECK(sup_distance(zero, offset) == doctest::Approx(2.5));

  // max |t - t^2| over the nodes of [0,1] is 0.25, attained at t = 0.5
  const SampledCurve sq = scalar_curve(g, [](double t) { return t * t; });
  CHECK(sup_distance(f, sq) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sup_distance requires a shared grid") {
  const TimeGrid g1 = make_grid({0.0, 1.0, 0.0}, 10);
  const TimeGrid g2 = make_grid({0.0, 1.0, 0.0}, 11);
  const SampledCurve a = SampledCurve::constant(g1, {0.0});
  const SampledCurve b = SampledCurve::constant(g2, {0.0});
  CHECK_THROWS_AS(sup_distance(a, b), GridMismatch);
}

TEST_CASE("sup_distance is a metric on random triples") {
  const TimeGrid g = make_grid({0.0, 2.0, 1.0}, 16);
  std::mt19937_64 rng(7);
  auto random_curve = [&]() {
    std::vector<Vec> values;
    for (int i = 0; i <= g.n_steps; ++i) {
      values.push_back({uniform_in(rng, -1.0, 1.0), uniform_in(rng, -1.0, 1.0)});
    }
    return SampledCurve(g, values);
  };
  for (int trial = 0; trial < 50; ++trial) {
    const SampledCurve a = random_curve();
    const SampledCurve b = random_curve();
    const SampledCurve c = random_curve();
    CHECK(sup_distance(a, b) == sup_distance(b, a));
    CHECK(sup_distance(a, a) == 0.0);
    CHECK(sup_distance(a, c) <= sup_distance(a, b) + sup_distance(b, c) + 1e-12);
  }
}

TEST_CASE("eval_curve is exact at nodes, linear between, clamped outside") {
  const TimeGrid g = make_grid({0.0, 1.0, 0.0}, 4);
  const SampledCurve f =
      SampledCurve(g, {{0.0}, {2.0}, {1.0}, {-1.0}, {4.0}});
  for (int i = 0; i <= g.n_steps; ++i) {
    CHECK(f.eval(g.node(i))[0] == f.value(i)[0]);
  }
  CHECK(f.eval(0.125)[0] == doctest::Approx(1.0));  // midpoint of 0 and 2
  CHECK(f.eval(6.0)[0] == f.value(4)[0]);
  CHECK(f.eval(-3.0)[0] == f.value(0)[0]);
}

TEST_CASE("lipschitz_constant examples") {
  const TimeGrid g = make_grid({0.0, 2.0, 0.0}, 40);
  CHECK(SampledCurve::constant(g, {1.3, -2.0}).lipschitz_constant() == 0.0);

  const SampledCurve linear = scalar_curve(g, [](double t) { return 3.0 * t; });
  CHECK(linear.lipschitz_constant() == doctest::Approx(3.0).epsilon(1e-12));

  const TimeGrid gs = make_grid({0.0, 3.14159265358979323846, 0.0}, 1000);
  const SampledCurve sine = scalar_curve(gs, [](double t) { return std::sin(t); });
  CHECK(std::abs(sine.lipschitz_constant() - 1.0) <= 2.0 * gs.h);
}

TEST_CASE("eval is Lipschitz with the grid constant") {
  const TimeGrid g = make_grid({-1.0, 1.0, 0.0}, 32);
  std::mt19937_64 rng(99);
  std::vector<Vec> values;
  for (int i = 0; i <= g.n_steps; ++i) {
    values.push_back({uniform_in(rng, -2.0, 2.0)});
  }
  const SampledCurve f(g, values);
  const double lip = f.lipschitz_constant();
  for (int trial = 0; trial < 300; ++trial) {
    const double s = uniform_in(rng, -1.0, 1.0);
    const double t = uniform_in(rng, -1.0, 1.0);
    CHECK(dist(f.eval(s), f.eval(t)) <= lip * std::abs(s - t) + 1e-12);
  }
}

TEST_CASE("curves reject malformed values") {
  const TimeGrid g = make_grid({0.0, 1.0, 0.0}, 2);
  CHECK_THROWS_AS(SampledCurve(g, {{1.0}, {2.0}}), DomainError);
  CHECK_THROWS_AS(SampledCurve(g, {{1.0}, {2.0, 3.0}, {4.0}}), DomainError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SampledCurve(g, {{1.0}, {inf}, {4.0}}), DomainError);
}

TEST_CASE("vector field evaluation checks finiteness") {
  VectorField f;
  f.dim = 1;
  f.fn = [](double, const Vec& x) { return Vec{1.0 / x[0]}; };
  CHECK(f.eval(0.0, {2.0})[0] == 0.5);
  CHECK_THROWS_AS(f.eval(0.0, {0.0}), NonFiniteField);
}
