#include "curvecert/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace curvecert {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& key, double fallback,
                  bool required, std::vector<std::string>& violations) {
  if (!j.contains(key)) {
    if (required) {
      violations.push_back("missing required numeric field '" + key + "'");
    }
    return fallback;
  }
  if (!j.at(key).is_number()) {
    violations.push_back("field '" + key + "' must be a number");
    return fallback;
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) {
    violations.push_back("field '" + key + "' must be finite");
    return fallback;
  }
  return v;
}

Vec get_vector(const json& j, std::vector<std::string>& violations,
               const std::string& label) {
  Vec out;
  if (!j.is_array()) {
    violations.push_back(label + " must be an array of numbers");
    return out;
  }
  for (const auto& c : j) {
    if (!c.is_number() || !std::isfinite(c.get<double>())) {
      violations.push_back(label + " must contain finite numbers only");
      return {};
    }
    out.push_back(c.get<double>());
  }
  return out;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Solve: return "solve";
    case ScenarioKind::Flow: return "flow";
    case ScenarioKind::Certify: return "certify";
    case ScenarioKind::Manifold: return "manifold";
  }
  return "unknown";
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what(),
                     static_cast<std::size_t>(e.byte));
  }

  std::vector<std::string> violations;
  ScenarioConfig cfg;

  const std::string kind = j.value("kind", std::string{});
  if (kind == "solve") {
    cfg.kind = ScenarioKind::Solve;
  } else if (kind == "flow") {
    cfg.kind = ScenarioKind::Flow;
  } else if (kind == "certify") {
    cfg.kind = ScenarioKind::Certify;
  } else if (kind == "manifold") {
    cfg.kind = ScenarioKind::Manifold;
  } else {
    violations.push_back("kind must be one of solve|flow|certify|manifold");
  }

  if (j.contains("tolerances")) {
    const json& tol = j.at("tolerances");
    cfg.tol_fix = get_number(tol, "tol_fix", cfg.tol_fix, false, violations);
    cfg.max_iter = static_cast<int>(
        get_number(tol, "max_iter", cfg.max_iter, false, violations));
    cfg.slack = get_number(tol, "slack", cfg.slack, false, violations);
    cfg.certify_tol =
        get_number(tol, "certify_tol", cfg.certify_tol, false, violations);
  }

  if (cfg.kind == ScenarioKind::Manifold) {
    if (!j.contains("manifold") || !j.at("manifold").is_object()) {
      violations.push_back("manifold scenarios need a 'manifold' section");
    } else {
      const json& man = j.at("manifold");
      cfg.manifold_name = man.value("name", std::string{});
      if (cfg.manifold_name.empty()) {
        violations.push_back("manifold section needs a 'name'");
      }
      cfg.horizon = get_number(man, "horizon", cfg.horizon, true, violations);
      cfg.rho_switch_factor = get_number(man, "rho_switch_factor",
                                         cfg.rho_switch_factor, false, violations);
      cfg.manifold_n_steps = static_cast<int>(
          get_number(man, "n_steps", cfg.manifold_n_steps, false, violations));
      if (cfg.horizon <= 0.0) {
        violations.push_back("manifold horizon must be > 0");
      }
      if (!(cfg.rho_switch_factor > 0.0 && cfg.rho_switch_factor < 1.0)) {
        violations.push_back("rho_switch_factor must lie in (0, 1)");
      }
      if (cfg.manifold_n_steps < 2) {
        violations.push_back("manifold n_steps must be >= 2");
      }
    }
    if (!violations.empty()) {
      throw ValidationError(std::move(violations));
    }
    return cfg;
  }

  cfg.dimension =
      static_cast<int>(get_number(j, "dimension", 1.0, true, violations));
  if (cfg.dimension < 1) {
    violations.push_back("dimension must be >= 1");
  }

  if (!j.contains("field") || !j.at("field").is_array()) {
    violations.push_back("missing 'field': an array of component expressions");
  } else {
    for (const auto& c : j.at("field")) {
      if (!c.is_string()) {
        violations.push_back("field components must be expression strings");
        break;
      }
      cfg.field_exprs.push_back(c.get<std::string>());
    }
    if (cfg.dimension >= 1 &&
        cfg.field_exprs.size() != static_cast<std::size_t>(cfg.dimension)) {
      violations.push_back("field needs exactly one expression per dimension");
    } else {
      for (const auto& src : cfg.field_exprs) {
        try {
          parse_field_expr(src, cfg.dimension);
        } catch (const Error& e) {
          violations.push_back("field expression '" + src + "': " + e.what());
        }
      }
    }
  }

  if (j.contains("constants") && j.at("constants").is_object()) {
    const json& c = j.at("constants");
    cfg.a = get_number(c, "a", 0.0, true, violations);
    cfg.r = get_number(c, "r", 0.0, true, violations);
    cfg.L = get_number(c, "L", 0.0, true, violations);
    cfg.K = get_number(c, "K", 0.0, true, violations);
    if (c.contains("x0")) {
      cfg.x0 = get_vector(c.at("x0"), violations, "constants.x0");
    } else {
      violations.push_back("constants section needs the base point 'x0'");
    }
  } else {
    violations.push_back("missing 'constants' section {a, r, L, K, x0}");
  }

  if (j.contains("interval") && j.at("interval").is_object()) {
    const json& iv = j.at("interval");
    cfg.interval.tmin = get_number(iv, "tmin", 0.0, true, violations);
    cfg.interval.tmax = get_number(iv, "tmax", 0.0, true, violations);
    cfg.interval.t0 = get_number(iv, "t0", 0.0, true, violations);
  } else {
    violations.push_back("missing 'interval' section {tmin, tmax, t0}");
  }

  cfg.n_steps = static_cast<int>(get_number(j, "n_steps", 0.0, true, violations));

  if (!j.contains("starts") || !j.at("starts").is_array() || j.at("starts").empty()) {
    violations.push_back("missing 'starts': a nonempty array of start vectors");
  } else {
    for (const auto& s : j.at("starts")) {
      cfg.starts.push_back(get_vector(s, violations, "starts entry"));
    }
  }

  if (j.contains("perturb") && j.at("perturb").is_object()) {
    const json& p = j.at("perturb");
    cfg.perturb_node =
        static_cast<int>(get_number(p, "node", -1.0, true, violations));
    if (p.contains("delta")) {
      cfg.perturb_delta = get_vector(p.at("delta"), violations, "perturb.delta");
    } else {
      violations.push_back("perturb section needs 'delta'");
    }
  }

  // semantic invariants, collected together once the structure parsed
  if (violations.empty()) {
    if (cfg.n_steps < 2) {
      violations.push_back("n_steps must be >= 2");
    }
    if (!(cfg.interval.tmin <= cfg.interval.t0 && cfg.interval.t0 <= cfg.interval.tmax)) {
      violations.push_back("interval requires tmin <= t0 <= tmax");
    }
    if (cfg.a < 0.0 || cfg.r < 0.0 || cfg.L < 0.0 || cfg.K < 0.0) {
      violations.push_back("constants a, r, L, K must be >= 0");
    }
    if (cfg.r > cfg.a) {
      violations.push_back("constants must satisfy r <= a");
    }
    const double reach = std::max(cfg.interval.tmax - cfg.interval.t0,
                                  cfg.interval.t0 - cfg.interval.tmin);
    if (!(cfg.L * reach <= cfg.a - cfg.r)) {
      violations.push_back(
          "constants violate L * max(tmax - t0, t0 - tmin) <= a - r: " +
          std::to_string(cfg.L * reach) + " > " + std::to_string(cfg.a - cfg.r));
    }
    if (static_cast<int>(cfg.x0.size()) != cfg.dimension) {
      violations.push_back("x0 must have length 'dimension'");
    }
    for (std::size_t i = 0; i < cfg.starts.size(); ++i) {
      if (static_cast<int>(cfg.starts[i].size()) != cfg.dimension) {
        violations.push_back("starts[" + std::to_string(i) +
                             "] must have length 'dimension'");
      } else if (static_cast<int>(cfg.x0.size()) == cfg.dimension &&
                 dist(cfg.starts[i], cfg.x0) > cfg.r + 1e-9) {
        violations.push_back("starts[" + std::to_string(i) +
                             "] lies outside closedBall(x0, r)");
      }
    }
    if (cfg.kind == ScenarioKind::Certify && cfg.starts.size() != 2) {
      violations.push_back("certify scenarios need exactly two starts");
    }
    if (cfg.perturb_node >= 0 && cfg.perturb_node > cfg.n_steps) {
      violations.push_back("perturb.node must be a grid node index");
    }
    if (cfg.perturb_node >= 0 &&
        static_cast<int>(cfg.perturb_delta.size()) != cfg.dimension) {
      violations.push_back("perturb.delta must have length 'dimension'");
    }
    if (cfg.tol_fix <= 0.0) {
      violations.push_back("tol_fix must be > 0");
    }
    if (cfg.max_iter < 1) {
      violations.push_back("max_iter must be >= 1");
    }
  }

  if (!violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  return cfg;
}

VectorField make_field(const ScenarioConfig& config) {
  std::vector<FieldExpr> components;
  components.reserve(config.field_exprs.size());
  for (const auto& src : config.field_exprs) {
    components.push_back(parse_field_expr(src, config.dimension));
  }
  VectorField field;
  field.dim = config.dimension;
  field.norm_bound = config.L;
  field.lipschitz = config.K;
  field.ball = Ball{config.x0, config.a};
  field.fn = [components](double t, const Vec& x) {
    Vec out(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) {
      out[i] = components[i].eval(t, x);
    }
    return out;
  };
  return field;
}

}  // namespace curvecert
