#include "curvecert/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "curvecert/rng.hpp"

namespace curvecert {

namespace {

constexpr double kChartBallMargin = 0.995;  // Picard ball stays inside the chart
constexpr double kJacobianCrossTol = 1e-3;  // analytic vs finite-difference
constexpr double kTwoPi = 6.283185307179586476925287;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

Vec sample_local(std::mt19937_64& rng, int dim, double radius) {
  Vec dir(static_cast<std::size_t>(dim));
  double n = 0.0;
  do {
    for (auto& c : dir) {
      c = normal01(rng);
    }
    n = norm(dir);
  } while (n == 0.0);
  const double rad = radius * std::pow(uniform01(rng), 1.0 / dim);
  for (auto& c : dir) {
    c *= rad / n;
  }
  return dir;
}

}  // namespace

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = 1.0;
  }
  return m;
}

Vec Mat::apply(const Vec& v) const {
  Vec out(static_cast<std::size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < cols; ++c) {
      s += at(r, c) * v[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

const Chart& Atlas::chart(int id) const {
  for (const Chart& c : charts) {
    if (c.id == id) {
      return c;
    }
  }
  throw DomainError("atlas has no chart with id " + std::to_string(id));
}

int Atlas::preferred_chart(const Vec& p) const {
  int best = -1;
  double best_norm = std::numeric_limits<double>::infinity();
  for (const Chart& c : charts) {
    const Vec z = c.to_local(p);
    if (!all_finite(z)) {
      continue;
    }
    const double n = norm(z);
    if (n < c.rho_chart && n < best_norm) {
      best_norm = n;
      best = c.id;
    }
  }
  if (best < 0) {
    throw DomainError("no chart contains the given point");
  }
  return best;
}

Vec transition_map(const Atlas& atlas, int i, int j, const Vec& z) {
  return atlas.chart(j).to_local(atlas.chart(i).from_local(z));
}

Mat transition_jacobian(const ChartVectorField& field, const Atlas& atlas,
                        int i, int j, const Vec& z, double h_fd,
                        JacobianMode mode) {
  const Chart& ci = atlas.chart(i);
  const Chart& cj = atlas.chart(j);
  const int d = ci.local_dim;
  if (static_cast<int>(z.size()) != d) {
    throw DomainError("transition_jacobian: point dimension mismatch");
  }
  if (!(h_fd > 0.0)) {
    throw DomainError("transition_jacobian: h_fd must be > 0");
  }
  if (!(norm(z) + h_fd < ci.rho_chart)) {
    throw OutsideOverlap("point (with its finite-difference neighborhood) is "
                         "not inside chart " + std::to_string(i));
  }
  {
    const Vec zj = transition_map(atlas, i, j, z);
    if (!all_finite(zj) || !(norm(zj) < cj.rho_chart)) {
      throw OutsideOverlap("image of the point is not inside chart " +
                           std::to_string(j));
    }
  }

  const auto analytic = field.analytic_jacobian.find({i, j});
  const bool have_analytic = analytic != field.analytic_jacobian.end();
  if (mode == JacobianMode::AnalyticOnly) {
    if (!have_analytic) {
      throw DomainError("no analytic Jacobian registered for charts (" +
                        std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    return analytic->second(z);
  }

  Mat fd(d, d);
  for (int k = 0; k < d; ++k) {
    Vec zp = z;
    Vec zm = z;
    zp[static_cast<std::size_t>(k)] += h_fd;
    zm[static_cast<std::size_t>(k)] -= h_fd;
    const Vec tp = transition_map(atlas, i, j, zp);
    const Vec tm = transition_map(atlas, i, j, zm);
    if (!all_finite(tp) || !(norm(tp) < cj.rho_chart) || !all_finite(tm) ||
        !(norm(tm) < cj.rho_chart)) {
      throw OutsideOverlap("finite-difference stencil leaves chart " +
                           std::to_string(j));
    }
    for (int r = 0; r < d; ++r) {
      fd.at(r, k) = (tp[static_cast<std::size_t>(r)] - tm[static_cast<std::size_t>(r)]) /
                    (2.0 * h_fd);
    }
  }
  if (mode == JacobianMode::FiniteDifference || !have_analytic) {
    return fd;
  }

  Mat an = analytic->second(z);
  double worst = 0.0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      worst = std::max(worst, std::abs(an.at(r, c) - fd.at(r, c)));
    }
  }
  if (worst > kJacobianCrossTol) {
    throw ConsistencyError("analytic and finite-difference Jacobians disagree "
                           "by " + fmt(worst) + " for charts (" +
                           std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  return an;
}

ConsistencyReport check_field_consistency(const ChartVectorField& field,
                                          const Atlas& atlas, int samples,
                                          JacobianMode mode, double h_fd,
                                          std::uint64_t seed) {
  if (samples < 1) {
    throw DomainError("check_field_consistency needs samples >= 1");
  }
  std::mt19937_64 rng(seed);
  ConsistencyReport report;
  const int n_charts = static_cast<int>(atlas.charts.size());
  for (int s = 0; s < samples; ++s) {
    const Chart& ci = atlas.charts[static_cast<std::size_t>(s % n_charts)];
    const Vec z = sample_local(rng, ci.local_dim, 0.9 * ci.rho_chart);
    if (!(norm(z) + 2.0 * h_fd < ci.rho_chart)) {
      continue;
    }
    const Vec p = ci.from_local(z);
    for (const Chart& cj : atlas.charts) {
      if (cj.id == ci.id) {
        continue;
      }
      const Vec zj = cj.to_local(p);
      if (!all_finite(zj) || !(norm(zj) + 2.0 * h_fd < cj.rho_chart)) {
        continue;
      }
      const Mat jac = transition_jacobian(field, atlas, ci.id, cj.id, z, h_fd, mode);
      const Vec lhs = field.principal[static_cast<std::size_t>(cj.id)](zj);
      const Vec rhs = jac.apply(field.principal[static_cast<std::size_t>(ci.id)](z));
      const double violation = dist(lhs, rhs);
      ++report.n_checked;
      if (violation > report.max_violation) {
        report.max_violation = violation;
        report.worst_chart_from = ci.id;
        report.worst_chart_to = cj.id;
        report.worst_point = p;
      }
    }
  }
  return report;
}

ChartSolveResult solve_in_chart(const ChartVectorField& field, const Atlas& atlas,
                                int chart_id, const Vec& z_start, double t_start,
                                double horizon, const SolverConfig& cfg) {
  const Chart& chart = atlas.chart(chart_id);
  const double rho_switch = cfg.rho_switch_factor * chart.rho_chart;
  const double start_norm = norm(z_start);
  if (!(start_norm < rho_switch)) {
    throw DomainError("solve_in_chart: start is not inside the switch radius");
  }
  if (!(horizon > 0.0)) {
    throw DomainError("solve_in_chart: horizon must be > 0");
  }
  const double a = kChartBallMargin * chart.rho_chart - start_norm;
  if (!(a > 0.0)) {
    throw ChartTooSmall("no Picard ball fits inside chart " +
                        std::to_string(chart_id) + " around the start point");
  }
  const double L = field.norm_bound[static_cast<std::size_t>(chart_id)];
  const double K = field.lipschitz[static_cast<std::size_t>(chart_id)];
  // Shrink the window fractionally below a/L so the ball margin inequality
  // survives floating-point rounding.
  const double dt_max = L > 0.0 ? a * (1.0 - 1e-9) / L : horizon;
  const double window = std::min(horizon, dt_max);

  VectorField vf;
  vf.dim = chart.local_dim;
  vf.fn = [pp = field.principal[static_cast<std::size_t>(chart_id)]](
              double, const Vec& x) { return pp(x); };
  vf.norm_bound = L;
  vf.lipschitz = K;
  vf.ball = Ball{z_start, a};

  const TimeInterval interval{t_start, t_start + window, t_start};
  PicardProblem problem(vf, interval, z_start, a, 0.0, L, K);
  SolverOptions opts;
  opts.n_steps = cfg.n_steps;
  opts.tol_fix = cfg.tol_fix;
  opts.max_iter = cfg.max_iter;
  SolveResult solved = solve_ivp(problem, z_start, opts);

  const TimeGrid& g = solved.curve.grid();
  for (int k = 1; k <= g.n_steps; ++k) {
    if (norm(solved.curve.value(k)) >= rho_switch) {
      const TimeGrid sub = make_subgrid(g.tmin, g.h, k, 0);
      std::vector<Vec> values(solved.curve.values().begin(),
                              solved.curve.values().begin() + k + 1);
      ChartSolveResult res;
      res.curve = SampledCurve(sub, std::move(values));
      res.exit = ChartExit::HitSwitchRadius;
      res.t_exit = sub.tmax();
      return res;
    }
  }
  ChartSolveResult res;
  res.curve = std::move(solved.curve);
  res.exit = ChartExit::ReachedEnd;
  res.t_exit = g.tmax();
  return res;
}

double ManifoldTrajectory::t_begin() const {
  if (segments.empty()) {
    throw DomainError("empty trajectory");
  }
  return segments.front().t_begin;
}

double ManifoldTrajectory::t_end() const {
  if (segments.empty()) {
    throw DomainError("empty trajectory");
  }
  return segments.back().t_end;
}

int ManifoldTrajectory::chart_at(double t) const {
  if (segments.empty()) {
    throw DomainError("empty trajectory");
  }
  for (const auto& seg : segments) {
    if (t <= seg.t_end) {
      return seg.chart_id;
    }
  }
  return segments.back().chart_id;
}

Vec ManifoldTrajectory::local_at(double t) const {
  if (segments.empty()) {
    throw DomainError("empty trajectory");
  }
  for (const auto& seg : segments) {
    if (t <= seg.t_end) {
      return seg.curve.eval(t);
    }
  }
  return segments.back().curve.eval(t);
}

Vec ManifoldTrajectory::ambient_at(const Atlas& atlas, double t) const {
  if (segments.empty()) {
    throw DomainError("empty trajectory");
  }
  for (const auto& seg : segments) {
    if (t <= seg.t_end) {
      return atlas.chart(seg.chart_id).from_local(seg.curve.eval(t));
    }
  }
  const auto& last = segments.back();
  return atlas.chart(last.chart_id).from_local(last.curve.eval(t));
}

ManifoldTrajectory integrate_on_manifold(const ChartVectorField& field,
                                         const Atlas& atlas, const Vec& p_start,
                                         double t_start, double t_end,
                                         const SolverConfig& cfg) {
  if (!(t_end > t_start)) {
    throw DomainError("integrate_on_manifold requires t_end > t_start");
  }
  const ConsistencyReport consistency = check_field_consistency(
      field, atlas, cfg.consistency_samples, JacobianMode::Auto, cfg.h_fd, cfg.seed);
  if (consistency.max_violation > cfg.consistency_tol) {
    throw ConsistencyError("chart-local field representations disagree: worst "
                           "violation " + fmt(consistency.max_violation) +
                           " between charts (" +
                           std::to_string(consistency.worst_chart_from) + ", " +
                           std::to_string(consistency.worst_chart_to) + ")");
  }

  ManifoldTrajectory traj;
  const double t_eps = 1e-9 * std::max(1.0, std::abs(t_end));
  double t = t_start;
  int chart_id = atlas.preferred_chart(p_start);
  Vec z = atlas.chart(chart_id).to_local(p_start);
  constexpr int kMaxSegments = 100000;

  while (t < t_end - t_eps) {
    const Chart& chart = atlas.chart(chart_id);
    const double rho_switch = cfg.rho_switch_factor * chart.rho_chart;
    if (!(norm(z) < rho_switch)) {
      throw NoProgress("preferred chart holds the point at local norm " +
                       fmt(norm(z)) + " >= switch radius " + fmt(rho_switch) +
                       "; the atlas does not cover at the switch radius");
    }
    ChartSolveResult res =
        solve_in_chart(field, atlas, chart_id, z, t, t_end - t, cfg);
    if (!(res.t_exit - t >= res.curve.grid().h * 0.5)) {
      throw NoProgress("chart step advanced time by less than one grid step");
    }
    if (!traj.segments.empty() &&
        traj.segments.back().chart_id != chart_id) {
      traj.switch_times.push_back(t);
    }
    traj.segments.push_back(TrajectorySegment{chart_id, res.curve, t, res.t_exit});
    if (static_cast<int>(traj.segments.size()) > kMaxSegments) {
      throw NoProgress("segment budget exhausted before reaching t_end");
    }

    t = res.t_exit;
    const Vec z_last = res.curve.value(res.curve.n_nodes() - 1);
    const Vec p = chart.from_local(z_last);
    const int next_chart = atlas.preferred_chart(p);
    if (next_chart == chart_id) {
      z = z_last;  // stay in chart coordinates, no round trip
    } else {
      z = atlas.chart(next_chart).to_local(p);
      // Ambient gap introduced by the chart transfer at this boundary.
      const double gap =
          atlas.ambient_dist(atlas.chart(next_chart).from_local(z), p);
      const double gap_tol =
          kTolChart + 2.0 * res.curve.grid().h *
                          field.norm_bound[static_cast<std::size_t>(chart_id)];
      if (gap > gap_tol) {
        throw ConsistencyError("chart transfer tore the trajectory: ambient gap " +
                               fmt(gap) + " > " + fmt(gap_tol));
      }
      traj.switch_defects.push_back(gap);
      chart_id = next_chart;
    }
  }
  if (traj.segments.empty()) {
    throw DomainError("integration produced no segments");
  }
  return traj;
}

DefectResult verify_manifold_curve(const ManifoldTrajectory& traj,
                                   const ChartVectorField& field,
                                   const Atlas& atlas, double tol) {
  if (traj.segments.empty()) {
    throw DomainError("verify_manifold_curve: empty trajectory");
  }
  DefectResult res;
  int node_base = 0;
  for (const auto& seg : traj.segments) {
    VectorField vf;
    const Chart& chart = atlas.chart(seg.chart_id);
    vf.dim = chart.local_dim;
    vf.fn = [pp = field.principal[static_cast<std::size_t>(seg.chart_id)]](
                double, const Vec& x) { return pp(x); };
    vf.norm_bound = field.norm_bound[static_cast<std::size_t>(seg.chart_id)];
    vf.lipschitz = field.lipschitz[static_cast<std::size_t>(seg.chart_id)];
    vf.ball = Ball{Vec(static_cast<std::size_t>(chart.local_dim), 0.0), chart.rho_chart};

    const TimeGrid& g = seg.curve.grid();
    if (g.n_steps >= 2) {
      const DefectResult d = verify_integral_curve(seg.curve, vf, tol);
      if (d.max_defect > res.max_defect) {
        res.max_defect = d.max_defect;
        res.worst_node = node_base + d.worst_node;
      }
    } else if (g.n_steps == 1) {
      // One-interval segment: the difference quotient is the only estimate.
      const std::size_t dim = static_cast<std::size_t>(seg.curve.dim());
      Vec deriv(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        deriv[k] = (seg.curve.value(1)[k] - seg.curve.value(0)[k]) / g.h;
      }
      for (int i = 0; i <= 1; ++i) {
        const double defect = dist(deriv, vf.eval(g.node(i), seg.curve.value(i)));
        if (defect > res.max_defect) {
          res.max_defect = defect;
          res.worst_node = node_base + i;
        }
      }
    }
    node_base += seg.curve.n_nodes();
  }
  for (std::size_t s = 0; s + 1 < traj.segments.size(); ++s) {
    const auto& cur = traj.segments[s];
    const auto& nxt = traj.segments[s + 1];
    const Vec p_end = atlas.chart(cur.chart_id)
                          .from_local(cur.curve.value(cur.curve.n_nodes() - 1));
    const Vec p_next = atlas.chart(nxt.chart_id).from_local(nxt.curve.value(0));
    const double gap = atlas.ambient_dist(p_end, p_next);
    if (gap > res.max_defect) {
      res.max_defect = gap;
      res.worst_node = -1;  // boundary, not a node
    }
  }
  res.pass = res.max_defect <= tol;
  return res;
}

bool certify_manifold_uniqueness(const ChartVectorField& field, const Atlas& atlas,
                                 const Vec& p_start, double t_start, double t_end,
                                 const SolverConfig& cfg_a, const SolverConfig& cfg_b,
                                 double tol) {
  if (cfg_a.rho_switch_factor == cfg_b.rho_switch_factor &&
      cfg_a.n_steps == cfg_b.n_steps) {
    throw DomainError("certify_manifold_uniqueness requires configs that "
                      "differ in switch threshold and/or grid resolution");
  }
  const ManifoldTrajectory ta =
      integrate_on_manifold(field, atlas, p_start, t_start, t_end, cfg_a);
  const ManifoldTrajectory tb =
      integrate_on_manifold(field, atlas, p_start, t_start, t_end, cfg_b);
  constexpr int kSamples = 512;
  for (int s = 0; s <= kSamples; ++s) {
    const double t =
        t_start + (t_end - t_start) * static_cast<double>(s) / kSamples;
    const double d = atlas.ambient_dist(ta.ambient_at(atlas, t), tb.ambient_at(atlas, t));
    if (!(d <= tol)) {
      return false;
    }
  }
  return true;
}

BuiltinManifold builtin_circle() {
  BuiltinManifold m;
  m.name = "circle-unit-speed";

  // Two angle charts centered at angles 0 and pi. Local coordinate is the
  // angular offset from the center; rho_chart < pi keeps each chart clear of
  // its own branch cut.
  constexpr double rho = 2.8;
  Chart c0;
  c0.id = 0;
  c0.ambient_dim = 2;
  c0.local_dim = 1;
  c0.rho_chart = rho;
  c0.to_local = [](const Vec& p) { return Vec{std::atan2(p[1], p[0])}; };
  c0.from_local = [](const Vec& z) { return Vec{std::cos(z[0]), std::sin(z[0])}; };

  Chart c1;
  c1.id = 1;
  c1.ambient_dim = 2;
  c1.local_dim = 1;
  c1.rho_chart = rho;
  c1.to_local = [](const Vec& p) {
    return Vec{std::remainder(std::atan2(p[1], p[0]) - 3.14159265358979323846, kTwoPi)};
  };
  c1.from_local = [](const Vec& z) {
    const double theta = z[0] + 3.14159265358979323846;
    return Vec{std::cos(theta), std::sin(theta)};
  };

  m.atlas.charts = {c0, c1};

  auto unit_speed = [](const Vec&) { return Vec{1.0}; };
  m.field.principal = {unit_speed, unit_speed};
  m.field.norm_bound = {1.0, 1.0};
  m.field.lipschitz = {0.0, 0.0};
  auto unit_jac = [](const Vec&) { return Mat::identity(1); };
  m.field.analytic_jacobian[{0, 1}] = unit_jac;
  m.field.analytic_jacobian[{1, 0}] = unit_jac;
  return m;
}

BuiltinManifold builtin_sphere() {
  BuiltinManifold m;
  m.name = "sphere-rotation";

  // Stereographic projections: chart 0 projects from the north pole (small
  // coordinates near the south pole), chart 1 from the south pole. The
  // transition is the inversion z / ||z||^2; rho_chart = 2 keeps the two
  // switch balls covering the sphere even at a 0.6 switch factor, since
  // min(||z_N||, ||z_S||) <= 1 everywhere.
  constexpr double rho = 2.0;
  Chart north;
  north.id = 0;
  north.ambient_dim = 3;
  north.local_dim = 2;
  north.rho_chart = rho;
  north.to_local = [](const Vec& p) {
    const double denom = 1.0 - p[2];
    if (denom == 0.0) {
      return Vec{std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
    }
    return Vec{p[0] / denom, p[1] / denom};
  };
  north.from_local = [](const Vec& z) {
    const double s = z[0] * z[0] + z[1] * z[1];
    return Vec{2.0 * z[0] / (s + 1.0), 2.0 * z[1] / (s + 1.0), (s - 1.0) / (s + 1.0)};
  };

  Chart south;
  south.id = 1;
  south.ambient_dim = 3;
  south.local_dim = 2;
  south.rho_chart = rho;
  south.to_local = [](const Vec& p) {
    const double denom = 1.0 + p[2];
    if (denom == 0.0) {
      return Vec{std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
    }
    return Vec{p[0] / denom, p[1] / denom};
  };
  south.from_local = [](const Vec& z) {
    const double s = z[0] * z[0] + z[1] * z[1];
    return Vec{2.0 * z[0] / (s + 1.0), 2.0 * z[1] / (s + 1.0), (1.0 - s) / (s + 1.0)};
  };

  m.atlas.charts = {north, south};

  // Rotation about the z-axis is a rotation in both stereographic charts.
  auto rotation = [](const Vec& z) { return Vec{-z[1], z[0]}; };
  m.field.principal = {rotation, rotation};
  m.field.norm_bound = {rho, rho};  // ||v(z)|| = ||z|| < rho on the chart ball
  m.field.lipschitz = {1.0, 1.0};

  // d(z / ||z||^2) = (I * s - 2 z z^T) / s^2 with s = ||z||^2.
  auto inversion_jac = [](const Vec& z) {
    const double s = z[0] * z[0] + z[1] * z[1];
    Mat j(2, 2);
    j.at(0, 0) = (s - 2.0 * z[0] * z[0]) / (s * s);
    j.at(0, 1) = (-2.0 * z[0] * z[1]) / (s * s);
    j.at(1, 0) = (-2.0 * z[1] * z[0]) / (s * s);
    j.at(1, 1) = (s - 2.0 * z[1] * z[1]) / (s * s);
    return j;
  };
  m.field.analytic_jacobian[{0, 1}] = inversion_jac;
  m.field.analytic_jacobian[{1, 0}] = inversion_jac;
  return m;
}

}  // namespace curvecert
