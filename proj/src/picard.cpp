#include "curvecert/picard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

#include "curvecert/rng.hpp"

namespace curvecert {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

Vec sample_in_ball(std::mt19937_64& rng, const Vec& center, double radius) {
  const std::size_t d = center.size();
  Vec dir(d);
  double n = 0.0;
  do {
    for (std::size_t k = 0; k < d; ++k) {
      dir[k] = normal01(rng);
    }
    n = norm(dir);
  } while (n == 0.0);
  const double rad =
      radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
  Vec out(d);
  for (std::size_t k = 0; k < d; ++k) {
    out[k] = center[k] + rad * dir[k] / n;
  }
  return out;
}

void require_relations(const PicardProblem& p) {
  const std::string defect = p.relation_defect();
  if (!defect.empty()) {
    throw DomainError("problem constants are inconsistent: " + defect);
  }
}

}  // namespace

PicardProblem::PicardProblem(VectorField field_in, TimeInterval interval_in,
                             Vec x0_in, double a_in, double r_in, double L_in,
                             double K_in)
    : field(std::move(field_in)),
      interval(interval_in),
      x0(std::move(x0_in)),
      a(a_in),
      r(r_in),
      L(L_in),
      K(K_in) {
  interval.validate();
  if (!all_finite(x0) || x0.empty()) {
    throw DomainError("x0 must be a finite nonempty vector");
  }
  if (static_cast<int>(x0.size()) != field.dim) {
    throw DomainError("x0 dimension does not match the field");
  }
  if (!(a >= 0.0) || !(r >= 0.0) || !(L >= 0.0) || !(K >= 0.0)) {
    throw DomainError("constants a, r, L, K must be finite and >= 0");
  }
}

std::string PicardProblem::relation_defect() const {
  if (r > a) {
    return "r <= a violated (r = " + fmt(r) + ", a = " + fmt(a) + ")";
  }
  const double lhs = L * anchor_span();
  if (!(lhs <= a - r)) {
    return "L * max(tmax - t0, t0 - tmin) <= a - r violated (" + fmt(lhs) +
           " > " + fmt(a - r) + ")";
  }
  return {};
}

bool LipschitzCurveSpace::member(const SampledCurve& f) const {
  return membership_defect(f).empty();
}

std::string LipschitzCurveSpace::membership_defect(const SampledCurve& f) const {
  if (!f.grid().same_grid(grid)) {
    return "curve grid differs from the space grid";
  }
  const double start_dist = dist(f.start_value(), x0);
  if (!(start_dist <= r + kTolBall)) {
    return "start distance " + fmt(start_dist) + " exceeds r = " + fmt(r);
  }
  if (grid.n_steps >= 1) {
    const double lip = f.lipschitz_constant();
    if (!(lip <= L * (1.0 + kTolLip) + kTolBall)) {
      return "grid Lipschitz constant " + fmt(lip) + " exceeds L = " + fmt(L);
    }
  }
  return {};
}

bool ValidationReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) {
      return false;
    }
  }
  return true;
}

ValidationReport validate_problem(const PicardProblem& p, int samples,
                                  std::uint64_t seed) {
  if (samples < 2) {
    throw DomainError("validate_problem needs samples >= 2");
  }
  std::mt19937_64 rng(seed);
  ValidationReport report;

  // (i) empirical Lipschitz constant over random pairs in the ball
  ConditionCheck lip{"lipschitz_in_x", true, 0.0, ""};
  // (ii) empirical norm bound over the same samples
  ConditionCheck nb{"norm_bound", true, 0.0, ""};
  // (iv) continuity in t via small perturbations
  ConditionCheck cont{"continuity_in_t", true, 0.0, ""};
  const double span = p.interval.span();
  const double dt = 1e-7 * std::max(1.0, span);
  for (int s = 0; s < samples; ++s) {
    const double t = uniform_in(rng, p.interval.tmin, p.interval.tmax);
    const Vec x = sample_in_ball(rng, p.x0, p.a);
    Vec y = sample_in_ball(rng, p.x0, p.a);
    for (int tries = 0; tries < 8 && dist(x, y) < 1e-12; ++tries) {
      y = sample_in_ball(rng, p.x0, p.a);
    }
    const Vec vx = p.field.eval(t, x);
    const double nx = norm(vx);
    if (nx > nb.worst) {
      nb.worst = nx;
      nb.witness = "||v|| = " + fmt(nx) + " at t = " + fmt(t);
    }
    const double dxy = dist(x, y);
    if (dxy >= 1e-12) {
      const double est = dist(vx, p.field.eval(t, y)) / dxy;
      if (est > lip.worst) {
        lip.worst = est;
        lip.witness = "estimate " + fmt(est) + " at t = " + fmt(t);
      }
    }
    const double tp = clamp_time(t + dt, p.interval);
    if (tp != t) {
      const double jump = dist(vx, p.field.eval(tp, x));
      if (jump > cont.worst) {
        cont.worst = jump;
        cont.witness = "jump " + fmt(cont.worst) + " over dt = " + fmt(tp - t);
      }
    }
  }
  lip.pass = lip.worst <= p.K * (1.0 + 1e-9) + 1e-12;
  nb.pass = nb.worst <= p.L * (1.0 + 1e-9) + 1e-12;
  cont.pass = cont.worst <= 1e-4 * (1.0 + p.L);

  // (iii) the ball margin inequality, exact arithmetic on the declared data
  ConditionCheck margin{"ball_margin", false, 0.0, ""};
  const double lhs = p.L * p.anchor_span();
  const double rhs = p.a - p.r;
  margin.pass = (lhs <= rhs) && (p.r <= p.a);
  margin.worst = lhs - rhs;
  margin.witness = "L * max(tmax - t0, t0 - tmin) = " + fmt(lhs) +
                   " vs a - r = " + fmt(rhs);

  report.conditions = {lip, cont, nb, margin};
  return report;
}

SampledCurve picard_map(const VectorField& field, double t0, const Vec& x,
                        const SampledCurve& alpha) {
  const TimeGrid& g = alpha.grid();
  if (t0 != g.t0()) {
    throw GridMismatch("picard_map: t0 is not the grid anchor node");
  }
  if (static_cast<int>(x.size()) != field.dim || field.dim != alpha.dim()) {
    throw DomainError("picard_map: dimension mismatch");
  }
  if (!all_finite(x)) {
    throw DomainError("picard_map: start value must be finite");
  }
  const int n = g.n_steps;
  const std::size_t d = x.size();

  std::vector<Vec> f(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    f[static_cast<std::size_t>(i)] = field.eval(g.node(i), alpha.value(i));
  }

  std::vector<Vec> out(static_cast<std::size_t>(n) + 1);
  out[static_cast<std::size_t>(g.i0)] = x;
  const double half_h = 0.5 * g.h;
  for (int i = g.i0 + 1; i <= n; ++i) {
    const Vec& prev = out[static_cast<std::size_t>(i) - 1];
    const Vec& fa = f[static_cast<std::size_t>(i) - 1];
    const Vec& fb = f[static_cast<std::size_t>(i)];
    Vec v(d);
    for (std::size_t k = 0; k < d; ++k) {
      v[k] = prev[k] + half_h * (fa[k] + fb[k]);
    }
    out[static_cast<std::size_t>(i)] = std::move(v);
  }
  for (int i = g.i0 - 1; i >= 0; --i) {
    const Vec& nxt = out[static_cast<std::size_t>(i) + 1];
    const Vec& fa = f[static_cast<std::size_t>(i)];
    const Vec& fb = f[static_cast<std::size_t>(i) + 1];
    Vec v(d);
    for (std::size_t k = 0; k < d; ++k) {
      v[k] = nxt[k] - half_h * (fa[k] + fb[k]);
    }
    out[static_cast<std::size_t>(i)] = std::move(v);
  }
  return SampledCurve(g, std::move(out));
}

SampledCurve next_iterate(const PicardProblem& p, const Vec& x,
                          const SampledCurve& alpha) {
  require_relations(p);
  const LipschitzCurveSpace space{alpha.grid(), p.x0, p.r, p.L};
  const double start_dist = dist(x, p.x0);
  if (!(start_dist <= p.r + kTolBall)) {
    throw SpaceEscape("start x is outside closedBall(x0, r): dist = " +
                      fmt(start_dist) + ", r = " + fmt(p.r));
  }
  const std::string in_defect = space.membership_defect(alpha);
  if (!in_defect.empty()) {
    throw SpaceEscape("input curve is not a space member: " + in_defect);
  }
  SampledCurve out = picard_map(p.field, alpha.grid().t0(), x, alpha);
  const std::string out_defect = space.membership_defect(out);
  if (!out_defect.empty()) {
    // The theorem guarantees membership when (L, K, a, r) are honest, so an
    // escape falsifies the declarations.
    throw SpaceEscape("Picard iterate left the curve space: " + out_defect);
  }
  return out;
}

double contraction_bound(const PicardProblem& p, int n) {
  if (n < 1) {
    throw DomainError("contraction_bound needs n >= 1");
  }
  const double kt = p.K * p.anchor_span();
  double bound = 1.0;
  for (int j = 1; j <= n; ++j) {
    bound *= kt / static_cast<double>(j);
  }
  return bound;
}

SolveResult solve_ivp(const PicardProblem& p, const Vec& x,
                      const SolverOptions& opts) {
  require_relations(p);
  const double start_dist = dist(x, p.x0);
  if (!(start_dist <= p.r + kTolBall)) {
    throw SpaceEscape("start x is outside closedBall(x0, r): dist = " +
                      fmt(start_dist) + ", r = " + fmt(p.r));
  }

  if (p.interval.degenerate()) {
    const TimeGrid g = make_grid(p.interval, 0);
    ConvergenceCertificate cert;
    cert.iterations = 0;
    cert.final_step = 0.0;
    cert.residual = 0.0;
    cert.contraction_bound_theoretical = p.K * p.anchor_span();
    cert.converged = true;
    return {SampledCurve(g, {x}), cert};
  }

  if (opts.n_steps < 2) {
    throw DomainError("solve_ivp needs n_steps >= 2");
  }
  if (opts.max_iter < 1) {
    throw DomainError("solve_ivp needs max_iter >= 1");
  }
  const TimeGrid grid = make_grid(p.interval, opts.n_steps);
  const double tol_res = opts.tol_res < 0.0 ? 10.0 * grid.h : opts.tol_res;

  SampledCurve alpha = SampledCurve::constant(grid, x);
  if (opts.initial_curve) {
    const SampledCurve& init = *opts.initial_curve;
    if (!init.grid().same_grid(grid)) {
      throw GridMismatch("initial curve grid does not match the solve grid");
    }
    if (dist(init.start_value(), x) > kTolBall) {
      throw DomainError("initial curve does not start at x");
    }
    alpha = init;
  }

  ConvergenceCertificate cert;
  cert.contraction_bound_theoretical = p.K * p.anchor_span();
  double prev_step = -1.0;
  bool step_converged = false;
  for (int k = 1; k <= opts.max_iter; ++k) {
    SampledCurve nxt = next_iterate(p, x, alpha);
    const double step = sup_distance(nxt, alpha);
    alpha = std::move(nxt);
    cert.iterations = k;
    cert.final_step = step;
    if (prev_step > 0.0) {
      cert.contraction_ratio_observed = step / prev_step;
    } else if (step == 0.0) {
      cert.contraction_ratio_observed = 0.0;
    }
    if (step <= opts.tol_fix) {
      step_converged = true;
      break;
    }
    prev_step = step;
  }
  if (!step_converged) {
    throw NoConvergence("fixed point not reached after " +
                            std::to_string(cert.iterations) +
                            " iterations: final step " + fmt(cert.final_step) +
                            " > tol_fix",
                        cert);
  }
  cert.residual = verify_integral_curve(alpha, p.field, tol_res).max_defect;
  cert.converged = cert.final_step <= opts.tol_fix && cert.residual <= tol_res;
  return {std::move(alpha), cert};
}

DefectResult verify_integral_curve(const SampledCurve& alpha,
                                   const VectorField& field, double tol) {
  const TimeGrid& g = alpha.grid();
  if (g.n_steps < 2) {
    throw DomainError("verify_integral_curve needs n_steps >= 2");
  }
  DefectResult res;
  const std::size_t d = static_cast<std::size_t>(alpha.dim());
  Vec deriv(d);
  for (int i = 0; i <= g.n_steps; ++i) {
    if (i == 0) {
      for (std::size_t k = 0; k < d; ++k) {
        deriv[k] = (alpha.value(1)[k] - alpha.value(0)[k]) / g.h;
      }
    } else if (i == g.n_steps) {
      for (std::size_t k = 0; k < d; ++k) {
        deriv[k] = (alpha.value(i)[k] - alpha.value(i - 1)[k]) / g.h;
      }
    } else {
      for (std::size_t k = 0; k < d; ++k) {
        deriv[k] = (alpha.value(i + 1)[k] - alpha.value(i - 1)[k]) / (2.0 * g.h);
      }
    }
    const double defect = dist(deriv, field.eval(g.node(i), alpha.value(i)));
    if (defect > res.max_defect) {
      res.max_defect = defect;
      res.worst_node = i;
    }
  }
  res.pass = res.max_defect <= tol;
  return res;
}

bool FlowTable::all_ok() const {
  for (const auto& e : entries_) {
    if (!e.ok()) {
      return false;
    }
  }
  return true;
}

Vec FlowTable::flow(const Vec& x, double t) const {
  for (const auto& e : entries_) {
    if (e.start.size() == x.size() && dist(e.start, x) <= 1e-12) {
      if (!e.ok()) {
        throw DomainError("flow start failed to solve: " + e.error);
      }
      return e.curve->eval(t);
    }
  }
  throw DomainError("flow: start not present in the table");
}

FlowTable build_local_flow(const PicardProblem& p, const std::vector<Vec>& starts,
                           const SolverOptions& opts) {
  require_relations(p);
  const TimeGrid grid = make_grid(p.interval, p.interval.degenerate() ? 0 : opts.n_steps);

  auto solve_one = [&p, &opts](const Vec& start) -> FlowEntry {
    FlowEntry entry;
    entry.start = start;
    try {
      SolveResult res = solve_ivp(p, start, opts);
      entry.curve = std::move(res.curve);
      entry.certificate = res.certificate;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    return entry;
  };

  std::vector<FlowEntry> entries;
  entries.reserve(starts.size());
  if (starts.size() <= 1) {
    for (const Vec& s : starts) {
      entries.push_back(solve_one(s));
    }
  } else {
    // Independent solves; deterministic combination in start order.
    std::vector<std::future<FlowEntry>> futures;
    futures.reserve(starts.size());
    for (const Vec& s : starts) {
      futures.push_back(std::async(std::launch::async, solve_one, s));
    }
    for (auto& f : futures) {
      entries.push_back(f.get());
    }
  }
  return FlowTable(grid, std::move(entries));
}

SampledCurve random_member_curve(const TimeGrid& grid, const Vec& x, double L,
                                 std::uint64_t seed) {
  if (!(L >= 0.0)) {
    throw DomainError("random_member_curve needs L >= 0");
  }
  std::mt19937_64 rng(seed);
  const std::size_t d = x.size();
  const double budget = 0.9 * L * grid.h;
  std::vector<Vec> values(static_cast<std::size_t>(grid.n_nodes()));
  values[static_cast<std::size_t>(grid.i0)] = x;
  auto step_from = [&](const Vec& base) {
    Vec dir(d);
    double n = 0.0;
    do {
      for (std::size_t k = 0; k < d; ++k) {
        dir[k] = normal01(rng);
      }
      n = norm(dir);
    } while (n == 0.0);
    const double len = budget * uniform01(rng);
    Vec out(d);
    for (std::size_t k = 0; k < d; ++k) {
      out[k] = base[k] + len * dir[k] / n;
    }
    return out;
  };
  for (int i = grid.i0 + 1; i <= grid.n_steps; ++i) {
    values[static_cast<std::size_t>(i)] = step_from(values[static_cast<std::size_t>(i) - 1]);
  }
  for (int i = grid.i0 - 1; i >= 0; --i) {
    values[static_cast<std::size_t>(i)] = step_from(values[static_cast<std::size_t>(i) + 1]);
  }
  return SampledCurve(grid, std::move(values));
}

}  // namespace curvecert
