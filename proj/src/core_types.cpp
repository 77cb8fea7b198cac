#include "curvecert/core_types.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace curvecert {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void TimeInterval::validate() const {
  if (!std::isfinite(tmin) || !std::isfinite(tmax) || !std::isfinite(t0)) {
    throw DomainError("time interval has non-finite bounds");
  }
  if (!(tmin <= t0 && t0 <= tmax)) {
    throw DomainError("time interval requires tmin <= t0 <= tmax, got [" +
                      fmt(tmin) + ", " + fmt(tmax) + "] with t0 = " + fmt(t0));
  }
}

double clamp_time(double t, const TimeInterval& interval) {
  interval.validate();
  if (t < interval.tmin) {
    return interval.tmin;
  }
  if (t > interval.tmax) {
    return interval.tmax;
  }
  return t;
}

TimeGrid make_grid(const TimeInterval& interval, int n_steps) {
  interval.validate();
  TimeGrid g;
  g.tmin = interval.tmin;
  if (interval.degenerate()) {
    return g;  // single node at tmin == t0 == tmax
  }
  if (n_steps < 1) {
    throw DomainError("n_steps must be >= 1 for a non-degenerate interval");
  }
  g.n_steps = n_steps;
  g.h = (interval.tmax - interval.tmin) / static_cast<double>(n_steps);
  const long long i0 =
      std::llround((interval.t0 - interval.tmin) / g.h);
  g.i0 = static_cast<int>(std::clamp(i0, 0LL, static_cast<long long>(n_steps)));
  g.snap_error = std::abs(interval.t0 - g.node(g.i0));
  return g;
}

TimeGrid make_subgrid(double tmin, double h, int n_steps, int i0) {
  if (!std::isfinite(tmin) || !std::isfinite(h) || h <= 0.0) {
    throw DomainError("subgrid requires finite tmin and h > 0");
  }
  if (n_steps < 0 || i0 < 0 || i0 > n_steps) {
    throw DomainError("subgrid requires 0 <= i0 <= n_steps");
  }
  TimeGrid g;
  g.tmin = tmin;
  g.h = h;
  g.n_steps = n_steps;
  g.i0 = i0;
  return g;
}

SampledCurve::SampledCurve(TimeGrid grid, std::vector<Vec> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.n_nodes())) {
    throw DomainError("curve needs one value per grid node: expected " +
                      std::to_string(grid_.n_nodes()) + ", got " +
                      std::to_string(values_.size()));
  }
  dim_ = static_cast<int>(values_.front().size());
  if (dim_ < 1) {
    throw DomainError("curve values must have dimension >= 1");
  }
  for (const Vec& v : values_) {
    if (static_cast<int>(v.size()) != dim_) {
      throw DomainError("curve values have inconsistent dimensions");
    }
    if (!all_finite(v)) {
      throw DomainError("curve values must be finite");
    }
  }
}

SampledCurve SampledCurve::constant(const TimeGrid& grid, const Vec& x) {
  return SampledCurve(grid, std::vector<Vec>(static_cast<std::size_t>(grid.n_nodes()), x));
}

Vec SampledCurve::eval(double t) const {
  if (values_.empty()) {
    throw DomainError("eval on an empty curve");
  }
  const int n = grid_.n_steps;
  if (n == 0) {
    return values_[0];
  }
  if (t <= grid_.node(0)) {
    return values_[0];
  }
  if (t >= grid_.node(n)) {
    return values_[static_cast<std::size_t>(n)];
  }
  const double u = (t - grid_.tmin) / grid_.h;
  const long long jr = std::llround(u);
  if (jr >= 0 && jr <= n && grid_.node(static_cast<int>(jr)) == t) {
    return values_[static_cast<std::size_t>(jr)];  // exact node hit
  }
  int i = static_cast<int>(std::floor(u));
  i = std::clamp(i, 0, n - 1);
  double th = (t - grid_.node(i)) / grid_.h;
  th = std::clamp(th, 0.0, 1.0);
  const Vec& a = values_[static_cast<std::size_t>(i)];
  const Vec& b = values_[static_cast<std::size_t>(i) + 1];
  Vec out(static_cast<std::size_t>(dim_));
  for (int k = 0; k < dim_; ++k) {
    out[static_cast<std::size_t>(k)] =
        (1.0 - th) * a[static_cast<std::size_t>(k)] + th * b[static_cast<std::size_t>(k)];
  }
  return out;
}

double SampledCurve::lipschitz_constant() const {
  if (grid_.n_steps < 1) {
    throw DomainError("lipschitz constant needs n_steps >= 1");
  }
  double worst = 0.0;
  for (int i = 0; i < grid_.n_steps; ++i) {
    worst = std::max(worst, dist(values_[static_cast<std::size_t>(i) + 1],
                                 values_[static_cast<std::size_t>(i)]) /
                                grid_.h);
  }
  return worst;
}

double sup_distance(const SampledCurve& f, const SampledCurve& g) {
  if (!f.grid().same_grid(g.grid())) {
    throw GridMismatch("sup_distance requires curves on one grid");
  }
  if (f.dim() != g.dim()) {
    throw GridMismatch("sup_distance requires curves of one dimension");
  }
  double worst = 0.0;
  for (int i = 0; i < f.n_nodes(); ++i) {
    worst = std::max(worst, dist(f.value(i), g.value(i)));
  }
  return worst;
}

Vec VectorField::eval(double t, const Vec& x) const {
  if (!fn) {
    throw DomainError("vector field has no evaluator");
  }
  if (static_cast<int>(x.size()) != dim) {
    throw DomainError("vector field expects dimension " + std::to_string(dim) +
                      ", got " + std::to_string(x.size()));
  }
  Vec out = fn(t, x);
  if (static_cast<int>(out.size()) != dim) {
    throw NonFiniteField("vector field returned wrong dimension at t = " +
                         std::to_string(t));
  }
  if (!all_finite(out)) {
    throw NonFiniteField("vector field returned a non-finite value at t = " +
                         std::to_string(t));
  }
  return out;
}

}  // namespace curvecert
