#include "curvecert/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "curvecert/emit.hpp"
#include "curvecert/gronwall.hpp"
#include "curvecert/manifold.hpp"
#include "curvecert/picard.hpp"
#include "curvecert/version.hpp"

namespace curvecert {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& c : report.conditions) {
    out.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"worst", c.worst},
                   {"witness", c.witness}});
  }
  return out;
}

json to_json(const ConvergenceCertificate& cert) {
  return {{"iterations", cert.iterations},
          {"final_step", cert.final_step},
          {"residual", cert.residual},
          {"contraction_ratio_observed", cert.contraction_ratio_observed},
          {"contraction_bound_theoretical", cert.contraction_bound_theoretical},
          {"converged", cert.converged}};
}

json to_json(const GronwallCertificate& cert) {
  return {{"direction",
           cert.direction == Direction::Forward ? "forward" : "backward"},
          {"delta", cert.report.delta},
          {"eps_f", cert.report.eps_f},
          {"eps_g", cert.report.eps_g},
          {"K", cert.report.K},
          {"slack_used", cert.slack_used},
          {"min_margin", cert.min_margin},
          {"worst_node", cert.worst_node},
          {"pass", cert.pass}};
}

json problem_echo(const ScenarioConfig& cfg) {
  return {{"a", cfg.a},
          {"r", cfg.r},
          {"L", cfg.L},
          {"K", cfg.K},
          {"x0", cfg.x0},
          {"tmin", cfg.interval.tmin},
          {"tmax", cfg.interval.tmax},
          {"t0", cfg.interval.t0},
          {"n_steps", cfg.n_steps}};
}

json base_report(const ScenarioConfig& cfg, std::uint64_t seed) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"seed", seed},
          {"kind", to_string(cfg.kind)}};
}

void write_report(const json& report, const std::string& out_dir) {
  const fs::path path = fs::path(out_dir) / "certificate.json";
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open report file: " + path.string());
  }
  out << report.dump(2) << "\n";
}

PicardProblem problem_from(const ScenarioConfig& cfg) {
  return PicardProblem(make_field(cfg), cfg.interval, cfg.x0, cfg.a, cfg.r,
                       cfg.L, cfg.K);
}

SolverOptions options_from(const ScenarioConfig& cfg) {
  SolverOptions opts;
  opts.n_steps = cfg.n_steps;
  opts.tol_fix = cfg.tol_fix;
  opts.max_iter = cfg.max_iter;
  return opts;
}

BuiltinManifold manifold_by_name(const std::string& name) {
  if (name == "circle" || name == "circle-unit-speed") {
    return builtin_circle();
  }
  if (name == "sphere" || name == "sphere-rotation") {
    return builtin_sphere();
  }
  throw DomainError("unknown manifold scenario: " + name);
}

Vec manifold_start(const BuiltinManifold& m) {
  return m.atlas.charts.front().ambient_dim == 2 ? Vec{1.0, 0.0}
                                                 : Vec{1.0, 0.0, 0.0};
}

int run_solve(const ScenarioConfig& cfg, const std::string& out_dir,
              std::uint64_t seed) {
  const PicardProblem problem = problem_from(cfg);
  const ValidationReport validation = validate_problem(problem, 256, seed);
  const SolveResult solved = solve_ivp(problem, cfg.starts.front(), options_from(cfg));
  const double tol_res = 10.0 * solved.curve.grid().h;
  DefectResult defect{0.0, true, -1};
  if (solved.curve.grid().n_steps >= 2) {
    defect = verify_integral_curve(solved.curve, problem.field, tol_res);
  }
  emit_trajectory(solved.curve, (fs::path(out_dir) / "trajectory.csv").string());

  const bool pass =
      validation.all_pass() && solved.certificate.converged && defect.pass;
  json report = base_report(cfg, seed);
  report["problem"] = problem_echo(cfg);
  report["validation"] = to_json(validation);
  report["convergence"] = to_json(solved.certificate);
  report["defect"] = {{"max_defect", defect.max_defect},
                      {"tol", tol_res},
                      {"pass", defect.pass}};
  report["files"] = {"trajectory.csv"};
  report["pass"] = pass;
  write_report(report, out_dir);
  return pass ? kExitOk : kExitCertification;
}

int run_flow(const ScenarioConfig& cfg, const std::string& out_dir,
             std::uint64_t seed) {
  const PicardProblem problem = problem_from(cfg);
  const ValidationReport validation = validate_problem(problem, 256, seed);
  const FlowTable table = build_local_flow(problem, cfg.starts, options_from(cfg));

  json files = json::array();
  json per_start = json::array();
  bool any_failed = false;
  for (std::size_t i = 0; i < table.entries().size(); ++i) {
    const FlowEntry& entry = table.entries()[i];
    json e = {{"start", entry.start}, {"ok", entry.ok()}};
    if (entry.ok()) {
      char name[32];
      std::snprintf(name, sizeof(name), "trajectory_%02zu.csv", i);
      emit_trajectory(*entry.curve, (fs::path(out_dir) / name).string());
      files.push_back(name);
      e["convergence"] = to_json(entry.certificate);
    } else {
      any_failed = true;
      e["error"] = entry.error;
    }
    per_start.push_back(e);
  }

  json pairwise = json::array();
  bool pairs_pass = true;
  if (!any_failed) {
    for (std::size_t i = 0; i < table.entries().size(); ++i) {
      for (std::size_t j = i + 1; j < table.entries().size(); ++j) {
        const GronwallCertificate cert =
            certify_pair(*table.entries()[i].curve, *table.entries()[j].curve,
                         problem.field, cfg.K, cfg.slack);
        json p = to_json(cert);
        p["pair"] = {i, j};
        pairwise.push_back(p);
        pairs_pass = pairs_pass && cert.pass;
      }
    }
  }

  bool converged = !any_failed;
  for (const auto& entry : table.entries()) {
    converged = converged && entry.ok() && entry.certificate.converged;
  }
  const bool pass = validation.all_pass() && converged && pairs_pass;
  json report = base_report(cfg, seed);
  report["problem"] = problem_echo(cfg);
  report["validation"] = to_json(validation);
  report["starts"] = per_start;
  report["pairwise"] = pairwise;
  report["files"] = files;
  report["pass"] = pass;
  write_report(report, out_dir);
  if (any_failed) {
    return kExitNoConvergence;
  }
  return pass ? kExitOk : kExitCertification;
}

int run_certify(const ScenarioConfig& cfg, const std::string& out_dir,
                std::uint64_t seed) {
  const PicardProblem problem = problem_from(cfg);
  const ValidationReport validation = validate_problem(problem, 256, seed);
  const SolverOptions opts = options_from(cfg);
  const SolveResult a = solve_ivp(problem, cfg.starts[0], opts);
  SolveResult b = solve_ivp(problem, cfg.starts[1], opts);

  SampledCurve curve_b = b.curve;
  if (cfg.perturb_node >= 0) {
    std::vector<Vec> values = curve_b.values();
    Vec& v = values[static_cast<std::size_t>(cfg.perturb_node)];
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] += cfg.perturb_delta[k];
    }
    curve_b = SampledCurve(curve_b.grid(), std::move(values));
  }

  emit_trajectory(a.curve, (fs::path(out_dir) / "trajectory_a.csv").string());
  emit_trajectory(curve_b, (fs::path(out_dir) / "trajectory_b.csv").string());

  json report = base_report(cfg, seed);
  report["problem"] = problem_echo(cfg);
  report["validation"] = to_json(validation);
  report["convergence_a"] = to_json(a.certificate);
  report["convergence_b"] = to_json(b.certificate);
  report["files"] = {"trajectory_a.csv", "trajectory_b.csv"};

  bool pass = validation.all_pass() && a.certificate.converged &&
              b.certificate.converged;
  try {
    const GronwallCertificate cert =
        certify_pair(a.curve, curve_b, problem.field, cfg.K, cfg.slack);
    report["gronwall"] = to_json(cert);
    pass = pass && cert.pass;
    if (dist(cfg.starts[0], cfg.starts[1]) <= 1e-9) {
      const double tol =
          cfg.certify_tol < 0.0 ? 10.0 * a.curve.grid().h : cfg.certify_tol;
      const bool unique =
          certify_uniqueness(a.curve, curve_b, problem.field, cfg.K, tol);
      report["uniqueness"] = unique;
      pass = pass && unique;
    }
  } catch (const BallEscape& e) {
    report["gronwall"] = {{"pass", false}, {"error", e.what()}};
    pass = false;
  }
  report["pass"] = pass;
  write_report(report, out_dir);
  return pass ? kExitOk : kExitCertification;
}

int run_manifold(const ScenarioConfig& cfg, const std::string& out_dir,
                 std::uint64_t seed) {
  const BuiltinManifold m = manifold_by_name(cfg.manifold_name);
  SolverConfig solver;
  solver.n_steps = cfg.manifold_n_steps;
  solver.rho_switch_factor = cfg.rho_switch_factor;
  solver.tol_fix = cfg.tol_fix;
  solver.max_iter = std::max(cfg.max_iter, 20);
  solver.seed = seed;

  const Vec p_start = manifold_start(m);
  const ManifoldTrajectory traj =
      integrate_on_manifold(m.field, m.atlas, p_start, 0.0, cfg.horizon, solver);

  const ConsistencyReport consistency = check_field_consistency(
      m.field, m.atlas, 128, JacobianMode::Auto, solver.h_fd, seed);

  double max_h = 0.0;
  for (const auto& seg : traj.segments) {
    max_h = std::max(max_h, seg.curve.grid().h);
  }
  const double tol_verify = 10.0 * max_h + 10.0 * kTolChart;
  const DefectResult verification =
      verify_manifold_curve(traj, m.field, m.atlas, tol_verify);

  // Both builtin manifolds are unit spheres in their embedding; report the
  // worst norm drift over all emitted nodes.
  double norm_drift = 0.0;
  for (const auto& seg : traj.segments) {
    const Chart& chart = m.atlas.chart(seg.chart_id);
    for (int i = 0; i < seg.curve.n_nodes(); ++i) {
      norm_drift =
          std::max(norm_drift, std::abs(norm(chart.from_local(seg.curve.value(i))) - 1.0));
    }
  }
  double max_switch_defect = 0.0;
  for (double d : traj.switch_defects) {
    max_switch_defect = std::max(max_switch_defect, d);
  }

  emit_trajectory(traj, m.atlas, (fs::path(out_dir) / "trajectory.csv").string());

  const bool pass = verification.pass && norm_drift <= 1e-4 &&
                    consistency.max_violation <= solver.consistency_tol;
  json report = base_report(cfg, seed);
  report["manifold"] = {{"name", m.name},
                        {"horizon", cfg.horizon},
                        {"rho_switch_factor", cfg.rho_switch_factor},
                        {"n_steps", cfg.manifold_n_steps}};
  report["consistency"] = {{"max_violation", consistency.max_violation},
                           {"n_checked", consistency.n_checked}};
  report["trajectory"] = {{"segments", traj.segments.size()},
                          {"switches", traj.switch_times.size()},
                          {"max_switch_defect", max_switch_defect},
                          {"t_begin", traj.t_begin()},
                          {"t_end", traj.t_end()}};
  report["verification"] = {{"max_defect", verification.max_defect},
                            {"tol", tol_verify},
                            {"pass", verification.pass}};
  report["norm_drift"] = norm_drift;
  report["files"] = {"trajectory.csv"};
  report["pass"] = pass;
  write_report(report, out_dir);
  return pass ? kExitOk : kExitCertification;
}

void write_error_report(const ScenarioConfig& cfg, const std::string& out_dir,
                        std::uint64_t seed, const std::string& what) {
  try {
    json report = base_report(cfg, seed);
    report["error"] = what;
    report["pass"] = false;
    write_report(report, out_dir);
  } catch (...) {
    // the exit code still reports the failure class
  }
}

}  // namespace

int run_scenario(const ScenarioConfig& config, const std::string& out_dir,
                 std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  try {
    switch (config.kind) {
      case ScenarioKind::Solve:
        return run_solve(config, out_dir, seed);
      case ScenarioKind::Flow:
        return run_flow(config, out_dir, seed);
      case ScenarioKind::Certify:
        return run_certify(config, out_dir, seed);
      case ScenarioKind::Manifold:
        return run_manifold(config, out_dir, seed);
    }
    return kExitInternal;
  } catch (const NoConvergence& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitNoConvergence;
  } catch (const ConsistencyError& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConsistency;
  } catch (const NoProgress& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConsistency;
  } catch (const BallEscape& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitCertification;
  } catch (const SpaceEscape& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitNoConvergence;
  } catch (const NonFiniteField& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitNoConvergence;
  } catch (const ValidationError& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitInternal;
  }
}

int run_check(const ScenarioConfig& config, const std::string& out_dir,
              std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  try {
    json report = base_report(config, seed);
    bool pass = false;
    if (config.kind == ScenarioKind::Manifold) {
      const BuiltinManifold m = manifold_by_name(config.manifold_name);
      const ConsistencyReport consistency =
          check_field_consistency(m.field, m.atlas, 256, JacobianMode::Auto,
                                  1e-5, seed);
      SolverConfig defaults;
      pass = consistency.max_violation <= defaults.consistency_tol;
      report["consistency"] = {{"max_violation", consistency.max_violation},
                               {"n_checked", consistency.n_checked}};
      report["pass"] = pass;
      write_report(report, out_dir);
      return pass ? kExitOk : kExitConsistency;
    }
    const PicardProblem problem = problem_from(config);
    const ValidationReport validation = validate_problem(problem, 512, seed);
    pass = validation.all_pass();
    report["problem"] = problem_echo(config);
    report["validation"] = to_json(validation);
    report["pass"] = pass;
    write_report(report, out_dir);
    return pass ? kExitOk : kExitCertification;
  } catch (const ValidationError& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    write_error_report(config, out_dir, seed, e.what());
    return kExitInternal;
  }
}

}  // namespace curvecert
