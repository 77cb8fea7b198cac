#pragma once

#include <string>
#include <vector>

#include "curvecert/core_types.hpp"
#include "curvecert/picard.hpp"

namespace curvecert {

// Exponential envelope on the distance between eps-approximate integral
// curves that start delta apart:
//   K == 0:  delta + eps * x
//   K != 0:  delta * exp(K*x) + eps / K * (exp(K*x) - 1)
// The branch is selected by exact comparison with zero; near-zero K is
// covered by the continuity of the two branches, not by blending.
double gronwall_bound(double delta, double K, double eps, double x);

// Smallest eps this discretization can certify for alpha as an
// eps-approximate integral curve of the field (the max node defect).
double measure_defect(const SampledCurve& alpha, const VectorField& field);

enum class Direction { Forward, Backward };

struct DefectReport {
  double eps_f = 0.0;
  double eps_g = 0.0;
  double delta = 0.0;
  double K = 0.0;
};

struct GronwallCertificate {
  DefectReport report;
  Direction direction = Direction::Forward;
  // bound(delta, K, eps_f + eps_g + slack, t_i - tmin) - observed distance,
  // per node.
  std::vector<double> per_node_margin;
  bool pass = false;
  double slack_used = 0.0;
  double min_margin = 0.0;
  int worst_node = -1;
};

// Default interpolation slack: 10 * h * (1 + K) * exp(K * span).
double default_slack(const TimeGrid& grid, double K);

// Certify dist(f(t), g(t)) <= bound at every node, with measured defects as
// the eps values and delta the distance at the interval start. Passing slack
// < 0 selects default_slack. Requires both curves to stay in the field's
// declared Lipschitz ball (BallEscape otherwise).
GronwallCertificate certify_pair(const SampledCurve& f, const SampledCurve& g,
                                 const VectorField& field, double K,
                                 double slack = -1.0);

// Backward-in-time form: certify the time-reversed curves against the
// time-reversed field.
GronwallCertificate certify_pair_backward(const SampledCurve& f,
                                          const SampledCurve& g,
                                          const VectorField& field, double K,
                                          double slack = -1.0);

// Uniqueness special case: both curves start at the same anchor value
// (within tol_anchor); pass iff the pointwise distance stays below
// bound(tol_anchor, K, eps_f + eps_g, t - tmin) + tol at every node.
bool certify_uniqueness(const SampledCurve& f, const SampledCurve& g,
                        const VectorField& field, double K, double tol,
                        double tol_anchor = 1e-9);

// beta(t) = alpha(tmin + tmax - t) on the same grid (anchor mirrored).
SampledCurve time_reverse(const SampledCurve& alpha);

// w(t, x) = -field(tmin + tmax - t, x); a reversed curve is an approximate
// integral curve of the reversed field with the same defect.
VectorField time_reverse_field(const VectorField& field, double tmin, double tmax);

}  // namespace curvecert
