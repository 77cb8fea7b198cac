#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "curvecert/core_types.hpp"
#include "curvecert/picard.hpp"

namespace curvecert {

// Small dense matrix, row-major.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  static Mat identity(int n);
  Vec apply(const Vec& v) const;
};

// Round-trip tolerance for chart coordinate maps.
inline constexpr double kTolChart = 1e-9;

// Invertible coordinate map from a neighborhood on the manifold to the model
// space. Local coordinates are valid on the open ball ||z|| < rho_chart.
struct Chart {
  int id = 0;
  int ambient_dim = 0;
  int local_dim = 0;
  std::function<Vec(const Vec&)> to_local;
  std::function<Vec(const Vec&)> from_local;
  double rho_chart = 0.0;

  bool contains_local(const Vec& z) const { return norm(z) < rho_chart; }
};

// Covering collection of charts. The embedding metric is used for
// verification and distance reporting only, never by the integrator.
struct Atlas {
  std::vector<Chart> charts;

  const Chart& chart(int id) const;
  // Chart minimizing ||to_local(p)|| among charts containing p.
  int preferred_chart(const Vec& p) const;
  double ambient_dist(const Vec& p, const Vec& q) const { return dist(p, q); }
};

// Time-independent vector field given per chart by its principal part, with
// declared per-chart constants. Analytic transition Jacobians may be
// registered per ordered chart pair (i, j); finite differences are the
// fallback and the cross-check.
struct ChartVectorField {
  std::vector<std::function<Vec(const Vec&)>> principal;
  std::vector<double> norm_bound;  // L_i on the chart ball
  std::vector<double> lipschitz;   // K_i on the chart ball
  std::map<std::pair<int, int>, std::function<Mat(const Vec&)>> analytic_jacobian;
};

// phi_j after phi_i^{-1}, the coordinate change between overlapping charts.
Vec transition_map(const Atlas& atlas, int i, int j, const Vec& z);

enum class JacobianMode { Auto, AnalyticOnly, FiniteDifference };

// Derivative of the transition map at z. Analytic when registered (with a
// finite-difference cross-check in Auto mode), central differences otherwise.
Mat transition_jacobian(const ChartVectorField& field, const Atlas& atlas,
                        int i, int j, const Vec& z, double h_fd = 1e-5,
                        JacobianMode mode = JacobianMode::Auto);

struct ConsistencyReport {
  double max_violation = 0.0;
  int worst_chart_from = -1;
  int worst_chart_to = -1;
  Vec worst_point;  // ambient coordinates
  int n_checked = 0;
};

// Samples random overlap points and checks the trivialisation change rule
//   v_j(phi_j(p)) = D(phi_j after phi_i^{-1})(phi_i(p)) * v_i(phi_i(p)).
ConsistencyReport check_field_consistency(const ChartVectorField& field,
                                          const Atlas& atlas, int samples,
                                          JacobianMode mode = JacobianMode::Auto,
                                          double h_fd = 1e-5,
                                          std::uint64_t seed = 0);

struct SolverConfig {
  int n_steps = 1000;          // grid resolution per chart segment
  double tol_fix = 1e-12;
  int max_iter = 80;
  double rho_switch_factor = 0.8;  // rho_switch = factor * rho_chart
  double h_fd = 1e-5;
  double consistency_tol = 1e-3;
  int consistency_samples = 64;
  std::uint64_t seed = 0;
};

enum class ChartExit { ReachedEnd, HitSwitchRadius };

struct ChartSolveResult {
  SampledCurve curve;  // local coordinates, grid anchored at t_start
  ChartExit exit = ChartExit::ReachedEnd;
  double t_exit = 0.0;
};

// One Picard solve inside a chart. The problem ball is the largest one
// around z_start inside the chart domain, and the time window is sized by
// the ball margin condition (dt = a / L). The curve is truncated at the
// first node whose local norm reaches the switch radius.
ChartSolveResult solve_in_chart(const ChartVectorField& field, const Atlas& atlas,
                                int chart_id, const Vec& z_start, double t_start,
                                double horizon, const SolverConfig& cfg);

struct TrajectorySegment {
  int chart_id = 0;
  SampledCurve curve;  // local coordinates
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct ManifoldTrajectory {
  std::vector<TrajectorySegment> segments;
  std::vector<double> switch_times;    // times where the chart id changes
  std::vector<double> switch_defects;  // ambient gap at each chart change

  double t_begin() const;
  double t_end() const;
  int chart_at(double t) const;
  Vec local_at(double t) const;
  Vec ambient_at(const Atlas& atlas, double t) const;
};

// Chart-switching integration: pick the preferred chart, solve inside it,
// transfer the exit point, repeat until t_end. Runs a field consistency
// check first and refuses inconsistent fields.
ManifoldTrajectory integrate_on_manifold(const ChartVectorField& field,
                                         const Atlas& atlas, const Vec& p_start,
                                         double t_start, double t_end,
                                         const SolverConfig& cfg);

// Per-segment derivative defect against the chart-local principal part plus
// ambient continuity across all segment boundaries; max over both.
DefectResult verify_manifold_curve(const ManifoldTrajectory& traj,
                                   const ChartVectorField& field,
                                   const Atlas& atlas, double tol);

// Integrates twice with different chart-switch thresholds and/or grid
// resolutions and checks ambient agreement on a shared time sample; the
// numerical shadow of clopen-set uniqueness.
bool certify_manifold_uniqueness(const ChartVectorField& field, const Atlas& atlas,
                                 const Vec& p_start, double t_start, double t_end,
                                 const SolverConfig& cfg_a, const SolverConfig& cfg_b,
                                 double tol);

struct BuiltinManifold {
  std::string name;
  Atlas atlas;
  ChartVectorField field;
};

// Unit circle in R^2: two angle charts (centers at angle 0 and pi) with the
// unit-speed rotation field.
BuiltinManifold builtin_circle();

// Unit sphere in R^3: stereographic projections from the north and south
// poles with analytic transition Jacobians, carrying the z-axis rotation
// field.
BuiltinManifold builtin_sphere();

}  // namespace curvecert
