#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvecert/core_types.hpp"
#include "curvecert/field_expr.hpp"

namespace curvecert {

enum class ScenarioKind { Solve, Flow, Certify, Manifold };

std::string to_string(ScenarioKind kind);

// One run described by a JSON config file; see the README for the schema.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Solve;

  // vector-space scenarios
  int dimension = 1;
  std::vector<std::string> field_exprs;  // one component expression each
  Vec x0;
  double a = 0.0;
  double r = 0.0;
  double L = 0.0;
  double K = 0.0;
  TimeInterval interval;
  int n_steps = 1000;
  std::vector<Vec> starts;

  double tol_fix = 1e-10;
  int max_iter = 200;
  double slack = -1.0;       // gronwall slack; < 0 selects the default
  double certify_tol = -1.0; // uniqueness tolerance; < 0 selects 10*h

  // optional perturbation applied to the second certify curve
  int perturb_node = -1;
  Vec perturb_delta;

  // manifold scenarios
  std::string manifold_name;
  double horizon = 10.0;
  double rho_switch_factor = 0.8;
  int manifold_n_steps = 1000;
};

// Parses and fully validates a config; collects every violated invariant
// into one ValidationError rather than stopping at the first.
ScenarioConfig load_config(const std::string& path);

// Builds the vector field from the config's component expressions, with the
// declared constants and validity ball attached.
VectorField make_field(const ScenarioConfig& config);

}  // namespace curvecert
