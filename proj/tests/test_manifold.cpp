#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "curvecert/manifold.hpp"
#include "curvecert/rng.hpp"

using namespace curvecert;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec circle_point(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Flat two-chart atlas on R^2 where chart 1 applies the linear map A; the
// transition is exactly z -> A z.
Atlas linear_atlas(double a00, double a01, double a10, double a11) {
  Chart c0;
  c0.id = 0;
  c0.ambient_dim = 2;
  c0.local_dim = 2;
  c0.rho_chart = 10.0;
  c0.to_local = [](const Vec& p) { return p; };
  c0.from_local = [](const Vec& z) { return z; };
  Chart c1;
  c1.id = 1;
  c1.ambient_dim = 2;
  c1.local_dim = 2;
  c1.rho_chart = 100.0;
  c1.to_local = [=](const Vec& p) {
    return Vec{a00 * p[0] + a01 * p[1], a10 * p[0] + a11 * p[1]};
  };
  const double det = a00 * a11 - a01 * a10;
  c1.from_local = [=](const Vec& z) {
    return Vec{(a11 * z[0] - a01 * z[1]) / det, (-a10 * z[0] + a00 * z[1]) / det};
  };
  Atlas atlas;
  atlas.charts = {c0, c1};
  return atlas;
}

ChartVectorField zero_field_for(const Atlas& atlas) {
  ChartVectorField f;
  for (const Chart& c : atlas.charts) {
    f.principal.push_back([dim = c.local_dim](const Vec&) {
      return Vec(static_cast<std::size_t>(dim), 0.0);
    });
    f.norm_bound.push_back(0.0);
    f.lipschitz.push_back(0.0);
  }
  return f;
}

}  // namespace

TEST_CASE("circle charts round-trip on their domains") {
  const BuiltinManifold m = builtin_circle();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const double theta = uniform_in(rng, -kPi, kPi);
    const Vec p = circle_point(theta);
    for (const Chart& c : m.atlas.charts) {
      const Vec z = c.to_local(p);
      if (norm(z) < c.rho_chart) {
        CHECK(dist(c.from_local(z), p) <= 1e-12);
      }
    }
  }
}

TEST_CASE("sphere charts round-trip away from their poles") {
  const BuiltinManifold m = builtin_sphere();
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec p{normal01(rng), normal01(rng), normal01(rng)};
    const double n = norm(p);
    if (n < 1e-6) {
      continue;
    }
    for (double& c : p) {
      c /= n;
    }
    for (const Chart& c : m.atlas.charts) {
      const Vec z = c.to_local(p);
      if (all_finite(z) && norm(z) < c.rho_chart) {
        CHECK(dist(c.from_local(z), p) <= 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("builtin atlases cover at the switch radius") {
  std::mt19937_64 rng(9);
  // spot check of the covering invariant, down to the 0.6 switch factor
  const BuiltinManifold circle = builtin_circle();
  for (int trial = 0; trial < 200; ++trial) {
    const Vec p = circle_point(uniform_in(rng, -kPi, kPi));
    const Chart& c = circle.atlas.chart(circle.atlas.preferred_chart(p));
    CHECK(norm(c.to_local(p)) < 0.6 * c.rho_chart);
  }
  const BuiltinManifold sphere = builtin_sphere();
  for (int trial = 0; trial < 200; ++trial) {
    Vec p{normal01(rng), normal01(rng), normal01(rng)};
    const double n = norm(p);
    if (n < 1e-6) {
      continue;
    }
    for (double& coord : p) {
      coord /= n;
    }
    const Chart& c = sphere.atlas.chart(sphere.atlas.preferred_chart(p));
    CHECK(norm(c.to_local(p)) < 0.6 * c.rho_chart);
  }
}

TEST_CASE("sphere transition fixes the unit circle") {
  const BuiltinManifold m = builtin_sphere();
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = uniform_in(rng, -kPi, kPi);
    const Vec z{std::cos(theta), std::sin(theta)};
    const Vec image = transition_map(m.atlas, 0, 1, z);
    CHECK(dist(image, z) <= 1e-14);
  }
}

TEST_CASE("transition_jacobian is exact on identity and linear transitions") {
  const Atlas ident = linear_atlas(1.0, 0.0, 0.0, 1.0);
  ChartVectorField f = zero_field_for(ident);
  const Mat j = transition_jacobian(f, ident, 0, 1, {0.3, -0.2});
  CHECK(std::abs(j.at(0, 0) - 1.0) <= 1e-10);
  CHECK(std::abs(j.at(0, 1)) <= 1e-10);
  CHECK(std::abs(j.at(1, 0)) <= 1e-10);
  CHECK(std::abs(j.at(1, 1) - 1.0) <= 1e-10);

  const Atlas lin = linear_atlas(2.0, 1.0, -0.5, 3.0);
  ChartVectorField g = zero_field_for(lin);
  const Mat a = transition_jacobian(g, lin, 0, 1, {0.4, 0.1});
  CHECK(a.at(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(a.at(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a.at(1, 0) == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(a.at(1, 1) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("circle transition Jacobian is 1 on the overlap") {
  const BuiltinManifold m = builtin_circle();
  const Mat j = transition_jacobian(m.field, m.atlas, 0, 1, {2.0});
  CHECK(std::abs(j.at(0, 0) - 1.0) <= 1e-10);
}

TEST_CASE("sphere analytic and finite-difference Jacobians agree") {
  const BuiltinManifold m = builtin_sphere();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const double radius = uniform_in(rng, 0.6, 1.6);
    const double theta = uniform_in(rng, -kPi, kPi);
    const Vec z{radius * std::cos(theta), radius * std::sin(theta)};
    const Mat an =
        transition_jacobian(m.field, m.atlas, 0, 1, z, 1e-5, JacobianMode::AnalyticOnly);
    const Mat fd = transition_jacobian(m.field, m.atlas, 0, 1, z, 1e-5,
                                       JacobianMode::FiniteDifference);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(an.at(r, c) - fd.at(r, c)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("transition_jacobian rejects points outside the overlap") {
  const BuiltinManifold m = builtin_sphere();
  CHECK_THROWS_AS(
      transition_jacobian(m.field, m.atlas, 0, 1, {1.999999, 0.0}),
      OutsideOverlap);
  // image of a tiny z has huge norm in the other chart
  CHECK_THROWS_AS(transition_jacobian(m.field, m.atlas, 0, 1, {0.01, 0.0}),
                  OutsideOverlap);
}

TEST_CASE("field consistency holds for the builtin sphere rotation") {
  const BuiltinManifold m = builtin_sphere();
  const ConsistencyReport analytic = check_field_consistency(
      m.field, m.atlas, 256, JacobianMode::AnalyticOnly, 1e-5, 0);
  CHECK(analytic.n_checked > 50);
  CHECK(analytic.max_violation <= 1e-6);

  const ConsistencyReport fd = check_field_consistency(
      m.field, m.atlas, 256, JacobianMode::FiniteDifference, 1e-5, 0);
  CHECK(fd.max_violation <= 1e-4);
}

TEST_CASE("field consistency is zero for the zero field") {
  const BuiltinManifold m = builtin_sphere();
  const ChartVectorField zero = zero_field_for(m.atlas);
  ChartVectorField with_jacobians = zero;
  with_jacobians.analytic_jacobian = m.field.analytic_jacobian;
  const ConsistencyReport report =
      check_field_consistency(with_jacobians, m.atlas, 128, JacobianMode::Auto, 1e-5, 0);
  CHECK(report.max_violation == 0.0);
}

TEST_CASE("a deliberately negated chart field is flagged with its pair") {
  BuiltinManifold m = builtin_sphere();
  auto rotation = m.field.principal[0];
  m.field.principal[1] = [rotation](const Vec& z) {
    Vec v = rotation(z);
    for (double& c : v) {
      c = -c;
    }
    return v;
  };
  const ConsistencyReport report =
      check_field_consistency(m.field, m.atlas, 128, JacobianMode::Auto, 1e-5, 0);
  CHECK(report.max_violation > 0.5);
  CHECK(report.worst_chart_from != report.worst_chart_to);
  CHECK(report.worst_chart_from >= 0);
  CHECK(report.worst_chart_to >= 0);
}

TEST_CASE("solve_in_chart holds still under the zero field") {
  const BuiltinManifold m = builtin_circle();
  const ChartVectorField zero = zero_field_for(m.atlas);
  SolverConfig cfg;
  cfg.n_steps = 50;
  const ChartSolveResult res =
      solve_in_chart(zero, m.atlas, 0, {0.7}, 1.5, 2.0, cfg);
  CHECK(res.exit == ChartExit::ReachedEnd);
  CHECK(res.t_exit == doctest::Approx(3.5).epsilon(1e-12));
  for (int i = 0; i < res.curve.n_nodes(); ++i) {
    CHECK(res.curve.value(i)[0] == 0.7);
  }
}

TEST_CASE("solve_in_chart advances the circle angle linearly and exits") {
  const BuiltinManifold m = builtin_circle();
  SolverConfig cfg;
  cfg.n_steps = 2000;
  const double rho_switch = cfg.rho_switch_factor * m.atlas.chart(0).rho_chart;
  const ChartSolveResult res =
      solve_in_chart(m.field, m.atlas, 0, {0.0}, 0.0, 50.0, cfg);
  CHECK(res.exit == ChartExit::HitSwitchRadius);
  // theta(t) = t for unit speed, so the exit lands one node past rho_switch
  CHECK(res.t_exit >= rho_switch - 1e-9);
  CHECK(res.t_exit <= rho_switch + 2.0 * res.curve.grid().h);
  for (int i = 0; i < res.curve.n_nodes(); ++i) {
    CHECK(std::abs(res.curve.value(i)[0] - res.curve.grid().node(i)) <= 1e-9);
  }
}

TEST_CASE("solve_in_chart matches the stereographic image of the rotation") {
  const BuiltinManifold m = builtin_sphere();
  SolverConfig cfg;
  cfg.n_steps = 1000;
  cfg.tol_fix = 1e-12;
  // start at the image of (1, 0, 0) in the north-pole chart
  const ChartSolveResult res =
      solve_in_chart(m.field, m.atlas, 0, {1.0, 0.0}, 0.0, 0.3, cfg);
  const TimeGrid& g = res.curve.grid();
  double worst = 0.0;
  for (int i = 0; i <= g.n_steps; ++i) {
    const double t = g.node(i);
    worst = std::max(worst, dist(res.curve.value(i), {std::cos(t), std::sin(t)}));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("solve_in_chart rejects bad starts") {
  const BuiltinManifold m = builtin_circle();
  SolverConfig cfg;
  CHECK_THROWS_AS(solve_in_chart(m.field, m.atlas, 0, {2.5}, 0.0, 1.0, cfg),
                  DomainError);
}

TEST_CASE("integrate_on_manifold keeps a zero-field point fixed") {
  const BuiltinManifold m = builtin_circle();
  ChartVectorField zero = zero_field_for(m.atlas);
  zero.analytic_jacobian = m.field.analytic_jacobian;
  SolverConfig cfg;
  cfg.n_steps = 64;
  const Vec p0 = circle_point(0.4);
  const ManifoldTrajectory traj =
      integrate_on_manifold(zero, m.atlas, p0, 0.0, 5.0, cfg);
  CHECK(traj.segments.size() == 1);
  CHECK(traj.switch_times.empty());
  CHECK(dist(traj.ambient_at(m.atlas, 5.0), p0) <= 1e-12);
}

TEST_CASE("circle rotation switches charts and lands at start + horizon") {
  const BuiltinManifold m = builtin_circle();
  SolverConfig cfg;
  cfg.n_steps = 1000;
  const double horizon = 20.0;
  const ManifoldTrajectory traj =
      integrate_on_manifold(m.field, m.atlas, circle_point(0.0), 0.0, horizon, cfg);
  CHECK(traj.switch_times.size() >= 2);
  CHECK(dist(traj.ambient_at(m.atlas, horizon), circle_point(horizon)) <= 1e-3);
  for (double defect : traj.switch_defects) {
    CHECK(defect <= kTolChart + 2.0 * 1e-3 * 1.0);
  }
  // chart transfers carry time forward without gaps
  for (std::size_t s = 0; s + 1 < traj.segments.size(); ++s) {
    CHECK(traj.segments[s].t_end == traj.segments[s + 1].t_begin);
  }
}

TEST_CASE("sphere rotation stays on the sphere and tracks the equator") {
  const BuiltinManifold m = builtin_sphere();
  SolverConfig cfg;
  cfg.n_steps = 800;
  const double horizon = 10.0;
  const ManifoldTrajectory traj = integrate_on_manifold(
      m.field, m.atlas, {1.0, 0.0, 0.0}, 0.0, horizon, cfg);
  for (int s = 0; s <= 200; ++s) {
    const double t = horizon * s / 200.0;
    const Vec p = traj.ambient_at(m.atlas, t);
    CHECK(std::abs(norm(p) - 1.0) <= 1e-4);
    CHECK(dist(p, {std::cos(t), std::sin(t), 0.0}) <= 1e-3);
  }
}

TEST_CASE("verify_manifold_curve passes real output and catches teleports") {
  const BuiltinManifold m = builtin_circle();
  SolverConfig cfg;
  cfg.n_steps = 500;
  const ManifoldTrajectory traj =
      integrate_on_manifold(m.field, m.atlas, circle_point(0.0), 0.0, 8.0, cfg);
  const DefectResult ok = verify_manifold_curve(traj, m.field, m.atlas, 1e-6);
  CHECK(ok.pass);

  ManifoldTrajectory broken = traj;
  REQUIRE(broken.segments.size() >= 2);
  // teleport the second segment by rebuilding it with shifted values
  const TrajectorySegment& seg = broken.segments[1];
  std::vector<Vec> shifted = seg.curve.values();
  for (Vec& v : shifted) {
    v[0] += 0.5;
  }
  broken.segments[1].curve = SampledCurve(seg.curve.grid(), std::move(shifted));
  const DefectResult bad = verify_manifold_curve(broken, m.field, m.atlas, 1e-6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_defect >= 0.1);
}

TEST_CASE("verify_manifold_curve is zero for a constant trajectory") {
  const BuiltinManifold m = builtin_circle();
  ChartVectorField zero = zero_field_for(m.atlas);
  SolverConfig cfg;
  cfg.n_steps = 64;
  const ManifoldTrajectory traj =
      integrate_on_manifold(zero, m.atlas, circle_point(1.0), 0.0, 2.0, cfg);
  const DefectResult res = verify_manifold_curve(traj, zero, m.atlas, 1e-12);
  CHECK(res.max_defect == 0.0);
  CHECK(res.pass);
}

TEST_CASE("manifold uniqueness across solver configurations") {
  const BuiltinManifold m = builtin_sphere();
  SolverConfig a;
  a.rho_switch_factor = 0.8;
  a.n_steps = 500;
  SolverConfig b;
  b.rho_switch_factor = 0.6;
  b.n_steps = 700;
  CHECK(certify_manifold_uniqueness(m.field, m.atlas, {1.0, 0.0, 0.0}, 0.0, 5.0,
                                    a, b, 1e-3));
  CHECK_THROWS_AS(certify_manifold_uniqueness(m.field, m.atlas, {1.0, 0.0, 0.0},
                                              0.0, 5.0, a, a, 1e-3),
                  DomainError);
}

TEST_CASE("inconsistent fields are refused before integration") {
  BuiltinManifold m = builtin_circle();
  m.field.principal[1] = [](const Vec&) { return Vec{-1.0}; };
  SolverConfig cfg;
  CHECK_THROWS_AS(integrate_on_manifold(m.field, m.atlas, circle_point(0.0), 0.0,
                                        5.0, cfg),
                  ConsistencyError);
  SolverConfig other = cfg;
  other.n_steps = cfg.n_steps + 100;
  CHECK_THROWS_AS(certify_manifold_uniqueness(m.field, m.atlas, circle_point(0.0),
                                              0.0, 5.0, cfg, other, 1e-3),
                  ConsistencyError);
}

TEST_CASE("declared builtin field constants hold on the chart balls") {
  std::mt19937_64 rng(31);
  for (const BuiltinManifold& m : {builtin_circle(), builtin_sphere()}) {
    for (const Chart& c : m.atlas.charts) {
      const auto& v = m.field.principal[static_cast<std::size_t>(c.id)];
      const double L = m.field.norm_bound[static_cast<std::size_t>(c.id)];
      const double K = m.field.lipschitz[static_cast<std::size_t>(c.id)];
      for (int trial = 0; trial < 200; ++trial) {
        Vec a(static_cast<std::size_t>(c.local_dim));
        Vec b(static_cast<std::size_t>(c.local_dim));
        for (int k = 0; k < c.local_dim; ++k) {
          a[static_cast<std::size_t>(k)] =
              uniform_in(rng, -0.7, 0.7) * c.rho_chart;
          b[static_cast<std::size_t>(k)] =
              uniform_in(rng, -0.7, 0.7) * c.rho_chart;
        }
        if (norm(a) >= c.rho_chart || norm(b) >= c.rho_chart) {
          continue;
        }
        CHECK(norm(v(a)) <= L * (1.0 + 1e-12));
        const double d = dist(a, b);
        if (d > 1e-9) {
          CHECK(dist(v(a), v(b)) <= K * d * (1.0 + 1e-12) + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("integrating the negated field backward recovers the start") {
  const BuiltinManifold m = builtin_circle();
  SolverConfig cfg;
  cfg.n_steps = 800;
  const Vec p0 = circle_point(0.3);
  const ManifoldTrajectory forward =
      integrate_on_manifold(m.field, m.atlas, p0, 0.0, 3.0, cfg);
  const Vec p1 = forward.ambient_at(m.atlas, 3.0);

  BuiltinManifold negated = m;
  negated.field.principal[0] = [](const Vec&) { return Vec{-1.0}; };
  negated.field.principal[1] = [](const Vec&) { return Vec{-1.0}; };
  const ManifoldTrajectory backward =
      integrate_on_manifold(negated.field, negated.atlas, p1, 0.0, 3.0, cfg);
  CHECK(dist(backward.ambient_at(negated.atlas, 3.0), p0) <= 2e-3);
}
