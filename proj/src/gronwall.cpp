#include "curvecert/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace curvecert {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void require_in_ball(const SampledCurve& c, const Ball& ball, const char* which) {
  if (ball.center.empty()) {
    throw DomainError("field declares no Lipschitz ball; Gronwall hypotheses "
                      "cannot be checked");
  }
  for (int i = 0; i < c.n_nodes(); ++i) {
    const double d = dist(c.value(i), ball.center);
    if (!(d <= ball.radius + kTolBall)) {
      throw BallEscape(std::string(which) + " leaves the declared Lipschitz ball at node " +
                       std::to_string(i) + ": dist = " + fmt(d) +
                       " > a = " + fmt(ball.radius));
    }
  }
}

}  // namespace

double gronwall_bound(double delta, double K, double eps, double x) {
  if (!(delta >= 0.0) || !(K >= 0.0) || !(eps >= 0.0) || !(x >= 0.0)) {
    throw DomainError("gronwall_bound requires delta, K, eps, x >= 0");
  }
  if (K == 0.0) {
    return delta + eps * x;
  }
  const double e = std::exp(K * x);
  return delta * e + eps / K * (e - 1.0);
}

double measure_defect(const SampledCurve& alpha, const VectorField& field) {
  return verify_integral_curve(alpha, field, 0.0).max_defect;
}

double default_slack(const TimeGrid& grid, double K) {
  const double span = grid.tmax() - grid.tmin;
  return 10.0 * grid.h * (1.0 + K) * std::exp(K * span);
}

GronwallCertificate certify_pair(const SampledCurve& f, const SampledCurve& g,
                                 const VectorField& field, double K,
                                 double slack) {
  if (!f.grid().same_grid(g.grid())) {
    throw GridMismatch("certify_pair requires curves on one grid");
  }
  if (!(K >= 0.0)) {
    throw DomainError("certify_pair requires K >= 0");
  }
  require_in_ball(f, field.ball, "first curve");
  require_in_ball(g, field.ball, "second curve");

  const TimeGrid& grid = f.grid();
  GronwallCertificate cert;
  cert.direction = Direction::Forward;
  cert.slack_used = slack < 0.0 ? default_slack(grid, K) : slack;
  cert.report.K = K;
  cert.report.eps_f = measure_defect(f, field);
  cert.report.eps_g = measure_defect(g, field);
  cert.report.delta = dist(f.value(0), g.value(0));

  const double eps_sum = cert.report.eps_f + cert.report.eps_g + cert.slack_used;
  cert.per_node_margin.resize(static_cast<std::size_t>(grid.n_nodes()));
  cert.min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid.n_steps; ++i) {
    const double bound =
        gronwall_bound(cert.report.delta, K, eps_sum, grid.node(i) - grid.tmin);
    const double margin = bound - dist(f.value(i), g.value(i));
    cert.per_node_margin[static_cast<std::size_t>(i)] = margin;
    if (margin < cert.min_margin) {
      cert.min_margin = margin;
      cert.worst_node = i;
    }
  }
  cert.pass = cert.min_margin >= -cert.slack_used;
  return cert;
}

GronwallCertificate certify_pair_backward(const SampledCurve& f,
                                          const SampledCurve& g,
                                          const VectorField& field, double K,
                                          double slack) {
  const TimeGrid& grid = f.grid();
  const VectorField reversed = time_reverse_field(field, grid.tmin, grid.tmax());
  GronwallCertificate cert =
      certify_pair(time_reverse(f), time_reverse(g), reversed, K, slack);
  cert.direction = Direction::Backward;
  return cert;
}

bool certify_uniqueness(const SampledCurve& f, const SampledCurve& g,
                        const VectorField& field, double K, double tol,
                        double tol_anchor) {
  if (!f.grid().same_grid(g.grid())) {
    throw GridMismatch("certify_uniqueness requires curves on one grid");
  }
  if (!(K >= 0.0) || !(tol >= 0.0) || !(tol_anchor >= 0.0)) {
    throw DomainError("certify_uniqueness requires K, tol, tol_anchor >= 0");
  }
  const double delta0 = dist(f.value(0), g.value(0));
  if (!(delta0 <= tol_anchor)) {
    throw DomainError("curves do not share the anchor value: dist = " +
                      fmt(delta0) + " > tol_anchor = " + fmt(tol_anchor));
  }
  require_in_ball(f, field.ball, "first curve");
  require_in_ball(g, field.ball, "second curve");

  const TimeGrid& grid = f.grid();
  const double eps_sum = measure_defect(f, field) + measure_defect(g, field);
  for (int i = 0; i <= grid.n_steps; ++i) {
    const double bound =
        gronwall_bound(tol_anchor, K, eps_sum, grid.node(i) - grid.tmin) + tol;
    if (dist(f.value(i), g.value(i)) > bound) {
      return false;
    }
  }
  return true;
}

SampledCurve time_reverse(const SampledCurve& alpha) {
  const TimeGrid& g = alpha.grid();
  if (g.n_steps == 0) {
    return alpha;
  }
  const TimeGrid rg = make_subgrid(g.tmin, g.h, g.n_steps, g.n_steps - g.i0);
  std::vector<Vec> values(static_cast<std::size_t>(g.n_nodes()));
  for (int i = 0; i <= g.n_steps; ++i) {
    values[static_cast<std::size_t>(i)] = alpha.value(g.n_steps - i);
  }
  return SampledCurve(rg, std::move(values));
}

VectorField time_reverse_field(const VectorField& field, double tmin, double tmax) {
  VectorField out = field;
  const double mirror = tmin + tmax;
  out.fn = [inner = field, mirror](double t, const Vec& x) {
    Vec v = inner.eval(mirror - t, x);
    for (double& c : v) {
      c = -c;
    }
    return v;
  };
  return out;
}

}  // namespace curvecert
