#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "curvecert/errors.hpp"

namespace curvecert {

// States and tangent vectors are finite-dimensional coordinate vectors.
using Vec = std::vector<double>;

inline double norm(const Vec& v) {
  double s = 0.0;
  for (double c : v) {
    s += c * c;
  }
  return std::sqrt(s);
}

inline double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline bool all_finite(const Vec& v) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      return false;
    }
  }
  return true;
}

// Closed time interval [tmin, tmax] with anchor t0 inside it. tmin == tmax
// is the explicitly degenerate case; only the single-node curve lives there.
struct TimeInterval {
  double tmin = 0.0;
  double tmax = 0.0;
  double t0 = 0.0;

  void validate() const;
  bool degenerate() const { return tmin == tmax; }
  double span() const { return tmax - tmin; }
  // One-sided reach from the anchor: max(tmax - t0, t0 - tmin).
  double anchor_span() const { return std::max(tmax - t0, t0 - tmin); }
};

// Maps t to the nearest point of [tmin, tmax]; identity inside.
double clamp_time(double t, const TimeInterval& interval);

// Uniform grid with nodes tmin + i*h for i = 0..n_steps. node(i0) is the
// anchor time; make_grid snaps the requested t0 to the nearest node and
// records the snap error, so node(i0) is exact by construction.
struct TimeGrid {
  double tmin = 0.0;
  double h = 0.0;
  int n_steps = 0;
  int i0 = 0;
  double snap_error = 0.0;

  int n_nodes() const { return n_steps + 1; }
  double node(int i) const { return tmin + static_cast<double>(i) * h; }
  double t0() const { return node(i0); }
  double tmax() const { return node(n_steps); }
  bool same_grid(const TimeGrid& other) const {
    return tmin == other.tmin && h == other.h && n_steps == other.n_steps &&
           i0 == other.i0;
  }
};

TimeGrid make_grid(const TimeInterval& interval, int n_steps);

// Direct construction for sub-grids that must keep h bit-exact.
TimeGrid make_subgrid(double tmin, double h, int n_steps, int i0);

// Curve sampled at every grid node. Between nodes it evaluates as the
// piecewise-linear interpolant; outside the grid it clamps to the nearest
// endpoint. Immutable after construction.
class SampledCurve {
 public:
  SampledCurve() = default;
  SampledCurve(TimeGrid grid, std::vector<Vec> values);

  static SampledCurve constant(const TimeGrid& grid, const Vec& x);

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  int n_nodes() const { return static_cast<int>(values_.size()); }
  bool empty() const { return values_.empty(); }
  const Vec& value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<Vec>& values() const { return values_; }
  const Vec& start_value() const { return values_[static_cast<std::size_t>(grid_.i0)]; }

  Vec eval(double t) const;

  // Exact Lipschitz constant of the piecewise-linear interpolant:
  // max over adjacent nodes of dist(values[i+1], values[i]) / h.
  double lipschitz_constant() const;

 private:
  TimeGrid grid_;
  std::vector<Vec> values_;
  int dim_ = 0;
};

// Supremum distance over grid nodes. Throws GridMismatch if the curves do
// not share a grid.
double sup_distance(const SampledCurve& f, const SampledCurve& g);

struct Ball {
  Vec center;
  double radius = 0.0;
};

// Time-dependent vector field with declared constants: ||v(t,x)|| <= norm_bound
// and x -> v(t,x) is lipschitz-Lipschitz, both on ball x interval. The
// declarations are trusted inputs; validate_problem can refute them but never
// prove them.
struct VectorField {
  int dim = 0;
  std::function<Vec(double, const Vec&)> fn;
  double norm_bound = 0.0;  // L
  double lipschitz = 0.0;   // K
  Ball ball;

  // Finiteness-checked evaluation; throws NonFiniteField on NaN/Inf output.
  Vec eval(double t, const Vec& x) const;
};

}  // namespace curvecert
