#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvecert/core_types.hpp"

namespace curvecert {

// Membership slack for the Lipschitz curve space under floating point:
// kTolLip is relative on the Lipschitz bound, kTolBall absolute on the
// start-ball distance.
inline constexpr double kTolLip = 1e-9;
inline constexpr double kTolBall = 1e-9;

/**
 * One initial-value problem: field + interval + constants (x0, a, r, L, K).
 *
 * The constants promise that on closedBall(x0, a) x [tmin, tmax] the field
 * is bounded by L and K-Lipschitz in x, and that the ball margin inequality
 *   L * max(tmax - t0, t0 - tmin) <= a - r
 * holds, which is what guarantees one shared time window for every start in
 * closedBall(x0, r). Construction rejects malformed data (negative radii,
 * NaN, dimension mismatch); the relational conditions are checked on entry
 * to the solver operations and reported by validate_problem, so that invalid
 * constants can be constructed, refuted, and reported.
 */
struct PicardProblem {
  VectorField field;
  TimeInterval interval;
  Vec x0;
  double a = 0.0;
  double r = 0.0;
  double L = 0.0;
  double K = 0.0;

  PicardProblem(VectorField field_in, TimeInterval interval_in, Vec x0_in,
                double a_in, double r_in, double L_in, double K_in);

  double anchor_span() const { return interval.anchor_span(); }
  // Empty when the ball margin inequality and r <= a hold; otherwise a
  // description of the violation.
  std::string relation_defect() const;
};

// The curve space the Picard operator acts on: curves with grid Lipschitz
// constant <= L that start within distance r of x0.
struct LipschitzCurveSpace {
  TimeGrid grid;
  Vec x0;
  double r = 0.0;
  double L = 0.0;

  bool member(const SampledCurve& f) const;
  // Empty string when member; otherwise the violated condition with numbers.
  std::string membership_defect(const SampledCurve& f) const;
};

struct ConditionCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  std::string witness;
};

struct ValidationReport {
  std::vector<ConditionCheck> conditions;
  bool all_pass() const;
};

// Empirical refutation of the declared constants: Lipschitz and norm
// estimates over random samples in the ball, the exact ball margin
// inequality, and a small-perturbation continuity spot check. Can refute
// declarations, never prove them.
ValidationReport validate_problem(const PicardProblem& p, int samples,
                                  std::uint64_t seed = 0);

// One Picard step as a raw curve map:
//   t |-> x + integral from t0 to t of field(tau, alpha(tau))
// evaluated at every node by cumulative composite trapezoid quadrature
// outward from the anchor in both directions. Exact value x at t0.
SampledCurve picard_map(const VectorField& field, double t0, const Vec& x,
                        const SampledCurve& alpha);

// picard_map lifted to the curve space: checks the start ball and input
// membership, and asserts output membership. Output escaping the space
// falsifies the declared constants and raises SpaceEscape.
SampledCurve next_iterate(const PicardProblem& p, const Vec& x,
                          const SampledCurve& alpha);

// Classical n-fold iteration contraction factor (K*T)^n / n! with
// T = max(tmax - t0, t0 - tmin).
double contraction_bound(const PicardProblem& p, int n);

struct ConvergenceCertificate {
  int iterations = 0;
  double final_step = 0.0;
  double residual = 0.0;
  double contraction_ratio_observed = 0.0;
  double contraction_bound_theoretical = 0.0;  // single-step bound K*T
  bool converged = false;
};

// Fixed-point iteration hit max_iter before reaching tol_fix.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, ConvergenceCertificate cert)
      : Error(what), certificate(cert) {}
  ConvergenceCertificate certificate;
};

struct SolverOptions {
  int n_steps = 1000;
  double tol_fix = 1e-10;
  int max_iter = 200;
  double tol_res = -1.0;  // < 0 selects the default 10*h
  // Optional starting iterate; must live on the solve grid, be a space
  // member, and start at x. Defaults to the constant curve == x.
  std::optional<SampledCurve> initial_curve;
};

struct SolveResult {
  SampledCurve curve;
  ConvergenceCertificate certificate;
};

// Iterates next_iterate from the constant curve until the sup distance of
// successive iterates drops below tol_fix. The returned curve satisfies
// curve(t0) = x exactly. Throws NoConvergence if max_iter is exhausted.
SolveResult solve_ivp(const PicardProblem& p, const Vec& x,
                      const SolverOptions& opts = {});

struct DefectResult {
  double max_defect = 0.0;
  bool pass = false;
  int worst_node = -1;
};

// Derivative defect of a curve against a field: central differences at
// interior nodes, one-sided differences at the endpoints, max node distance
// to the field value along the curve.
DefectResult verify_integral_curve(const SampledCurve& alpha,
                                   const VectorField& field, double tol);

struct FlowEntry {
  Vec start;
  std::optional<SampledCurve> curve;
  ConvergenceCertificate certificate;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

// Integral curves for a set of starts in closedBall(x0, r), all on one
// shared grid.
class FlowTable {
 public:
  FlowTable() = default;
  FlowTable(TimeGrid grid, std::vector<FlowEntry> entries)
      : grid_(grid), entries_(std::move(entries)) {}

  const TimeGrid& grid() const { return grid_; }
  const std::vector<FlowEntry>& entries() const { return entries_; }
  bool all_ok() const;

  // Curve for the start x (matched within 1e-12), evaluated at t.
  Vec flow(const Vec& x, double t) const;

 private:
  TimeGrid grid_;
  std::vector<FlowEntry> entries_;
};

// Per-start solves are independent and run concurrently; entries are
// combined in start order regardless of completion order. Per-start failures
// are collected into the entries, not thrown.
FlowTable build_local_flow(const PicardProblem& p, const std::vector<Vec>& starts,
                           const SolverOptions& opts = {});

// Random space member starting exactly at x, with Lipschitz budget 0.9*L.
SampledCurve random_member_curve(const TimeGrid& grid, const Vec& x, double L,
                                 std::uint64_t seed);

}  // namespace curvecert
