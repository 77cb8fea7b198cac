#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curvecert/field_expr.hpp"
#include "curvecert/gronwall.hpp"
#include "curvecert/manifold.hpp"
#include "curvecert/picard.hpp"
#include "curvecert/version.hpp"

namespace py = pybind11;
using namespace curvecert;

namespace {

VectorField field_from_exprs(const std::vector<std::string>& components,
                             double L, double K, Vec center, double radius) {
  const int dim = static_cast<int>(components.size());
  std::vector<FieldExpr> parsed;
  parsed.reserve(components.size());
  for (const auto& src : components) {
    parsed.push_back(parse_field_expr(src, dim));
  }
  VectorField field;
  field.dim = dim;
  field.norm_bound = L;
  field.lipschitz = K;
  field.ball = Ball{std::move(center), radius};
  field.fn = [parsed](double t, const Vec& x) {
    Vec out(parsed.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      out[i] = parsed[i].eval(t, x);
    }
    return out;
  };
  return field;
}

SolverOptions make_options(int n_steps, double tol_fix, int max_iter) {
  SolverOptions opts;
  opts.n_steps = n_steps;
  opts.tol_fix = tol_fix;
  opts.max_iter = max_iter;
  return opts;
}

SolverConfig make_solver_config(int n_steps, double tol_fix, int max_iter,
                                double rho_switch_factor) {
  SolverConfig cfg;
  cfg.n_steps = n_steps;
  cfg.tol_fix = tol_fix;
  cfg.max_iter = max_iter;
  cfg.rho_switch_factor = rho_switch_factor;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "certified integral-curve engine: Picard iteration to a verified "
            "fixed point, Gronwall distance certificates, and chart-based "
            "integration on builtin manifolds";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<GridMismatch>(m, "GridMismatchError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ExprParseError", PyExc_ValueError);
  py::register_exception<UnknownVariable>(m, "UnknownVariableError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ArithmeticError);
  py::register_exception<NoConvergence>(m, "NoConvergenceError", PyExc_RuntimeError);
  py::register_exception<SpaceEscape>(m, "SpaceEscapeError", PyExc_RuntimeError);
  py::register_exception<BallEscape>(m, "BallEscapeError", PyExc_RuntimeError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);
  py::register_exception<NoProgress>(m, "NoProgressError", PyExc_RuntimeError);

  py::class_<TimeInterval>(m, "TimeInterval")
      .def(py::init<double, double, double>(), py::arg("tmin"), py::arg("tmax"),
           py::arg("t0"))
      .def_readonly("tmin", &TimeInterval::tmin)
      .def_readonly("tmax", &TimeInterval::tmax)
      .def_readonly("t0", &TimeInterval::t0)
      .def("__repr__", [](const TimeInterval& interval) {
        return "TimeInterval(tmin=" + std::to_string(interval.tmin) +
               ", tmax=" + std::to_string(interval.tmax) +
               ", t0=" + std::to_string(interval.t0) + ")";
      });

  py::class_<TimeGrid>(m, "TimeGrid")
      .def_readonly("tmin", &TimeGrid::tmin)
      .def_readonly("h", &TimeGrid::h)
      .def_readonly("n_steps", &TimeGrid::n_steps)
      .def_readonly("i0", &TimeGrid::i0)
      .def_readonly("snap_error", &TimeGrid::snap_error)
      .def("node", &TimeGrid::node)
      .def("t0", &TimeGrid::t0)
      .def("tmax", &TimeGrid::tmax);

  m.def("make_grid", &make_grid, py::arg("interval"), py::arg("n_steps"));
  m.def("clamp_time", &clamp_time, py::arg("t"), py::arg("interval"));

  py::class_<SampledCurve>(m, "SampledCurve")
      .def(py::init<TimeGrid, std::vector<Vec>>(), py::arg("grid"),
           py::arg("values"))
      .def_static("constant", &SampledCurve::constant, py::arg("grid"),
                  py::arg("x"))
      .def_property_readonly("grid", &SampledCurve::grid)
      .def_property_readonly("dim", &SampledCurve::dim)
      .def("values", &SampledCurve::values)
      .def("times",
           [](const SampledCurve& c) {
             std::vector<double> out;
             out.reserve(static_cast<std::size_t>(c.n_nodes()));
             for (int i = 0; i < c.n_nodes(); ++i) {
               out.push_back(c.grid().node(i));
             }
             return out;
           })
      .def("eval", &SampledCurve::eval, py::arg("t"))
      .def("__call__", &SampledCurve::eval, py::arg("t"))
      .def("lipschitz_constant", &SampledCurve::lipschitz_constant)
      .def("__len__", &SampledCurve::n_nodes);

  m.def("sup_distance", &sup_distance, py::arg("f"), py::arg("g"));

  py::class_<VectorField>(m, "VectorField")
      .def_readonly("dim", &VectorField::dim)
      .def_readonly("norm_bound", &VectorField::norm_bound)
      .def_readonly("lipschitz", &VectorField::lipschitz)
      .def("eval", &VectorField::eval, py::arg("t"), py::arg("x"));

  m.def("make_field", &field_from_exprs, py::arg("components"), py::arg("L"),
        py::arg("K"), py::arg("center"), py::arg("radius"),
        "Vector field from one expression per component (variables t and "
        "x0..x{d-1}), with declared norm/Lipschitz bounds on the given ball");

  py::class_<FieldExpr>(m, "FieldExpr")
      .def("eval",
           [](const FieldExpr& e, double t, const std::vector<double>& x) {
             return e.eval(t, x);
           },
           py::arg("t"), py::arg("x"))
      .def("__str__", &FieldExpr::to_string);
  m.def("parse_field_expr", &parse_field_expr, py::arg("source"), py::arg("dim"));

  py::class_<PicardProblem>(m, "PicardProblem")
      .def(py::init<VectorField, TimeInterval, Vec, double, double, double,
                    double>(),
           py::arg("field"), py::arg("interval"), py::arg("x0"), py::arg("a"),
           py::arg("r"), py::arg("L"), py::arg("K"))
      .def_readonly("a", &PicardProblem::a)
      .def_readonly("r", &PicardProblem::r)
      .def_readonly("L", &PicardProblem::L)
      .def_readonly("K", &PicardProblem::K)
      .def_readonly("x0", &PicardProblem::x0)
      .def_readonly("interval", &PicardProblem::interval);

  py::class_<ConditionCheck>(m, "ConditionCheck")
      .def_readonly("name", &ConditionCheck::name)
      .def_readonly("pass_", &ConditionCheck::pass)
      .def_readonly("worst", &ConditionCheck::worst)
      .def_readonly("witness", &ConditionCheck::witness);
  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("conditions", &ValidationReport::conditions)
      .def("all_pass", &ValidationReport::all_pass);
  m.def("validate_problem", &validate_problem, py::arg("problem"),
        py::arg("samples"), py::arg("seed") = 0);

  py::class_<ConvergenceCertificate>(m, "ConvergenceCertificate")
      .def_readonly("iterations", &ConvergenceCertificate::iterations)
      .def_readonly("final_step", &ConvergenceCertificate::final_step)
      .def_readonly("residual", &ConvergenceCertificate::residual)
      .def_readonly("contraction_ratio_observed",
                    &ConvergenceCertificate::contraction_ratio_observed)
      .def_readonly("contraction_bound_theoretical",
                    &ConvergenceCertificate::contraction_bound_theoretical)
      .def_readonly("converged", &ConvergenceCertificate::converged);

  m.def(
      "solve_ivp",
      [](const PicardProblem& p, const Vec& x, int n_steps, double tol_fix,
         int max_iter) {
        const SolveResult res = solve_ivp(p, x, make_options(n_steps, tol_fix, max_iter));
        return py::make_tuple(res.curve, res.certificate);
      },
      py::arg("problem"), py::arg("x"), py::arg("n_steps") = 1000,
      py::arg("tol_fix") = 1e-10, py::arg("max_iter") = 200,
      "Picard iteration to a certified fixed point; returns (curve, certificate)");

  m.def("picard_map", &picard_map, py::arg("field"), py::arg("t0"), py::arg("x"),
        py::arg("alpha"));
  m.def("next_iterate", &next_iterate, py::arg("problem"), py::arg("x"),
        py::arg("alpha"));
  m.def("contraction_bound", &contraction_bound, py::arg("problem"), py::arg("n"));
  m.def(
      "verify_integral_curve",
      [](const SampledCurve& alpha, const VectorField& field, double tol) {
        const DefectResult res = verify_integral_curve(alpha, field, tol);
        return py::make_tuple(res.max_defect, res.pass);
      },
      py::arg("alpha"), py::arg("field"), py::arg("tol"));

  py::class_<FlowEntry>(m, "FlowEntry")
      .def_readonly("start", &FlowEntry::start)
      .def_readonly("certificate", &FlowEntry::certificate)
      .def_readonly("error", &FlowEntry::error)
      .def("ok", &FlowEntry::ok)
      .def_property_readonly("curve",
                             [](const FlowEntry& e) { return e.curve; });
  py::class_<FlowTable>(m, "FlowTable")
      .def_property_readonly("grid", &FlowTable::grid)
      .def_property_readonly("entries", &FlowTable::entries)
      .def("all_ok", &FlowTable::all_ok)
      .def("flow", &FlowTable::flow, py::arg("x"), py::arg("t"));
  m.def(
      "build_local_flow",
      [](const PicardProblem& p, const std::vector<Vec>& starts, int n_steps,
         double tol_fix, int max_iter) {
        return build_local_flow(p, starts, make_options(n_steps, tol_fix, max_iter));
      },
      py::arg("problem"), py::arg("starts"), py::arg("n_steps") = 1000,
      py::arg("tol_fix") = 1e-10, py::arg("max_iter") = 200);

  m.def("gronwall_bound", &gronwall_bound, py::arg("delta"), py::arg("K"),
        py::arg("eps"), py::arg("x"),
        "delta*exp(K*x) + eps/K*(exp(K*x) - 1), or delta + eps*x when K == 0");
  m.def("measure_defect", &measure_defect, py::arg("alpha"), py::arg("field"));

  py::class_<GronwallCertificate>(m, "GronwallCertificate")
      .def_property_readonly("delta",
                             [](const GronwallCertificate& c) { return c.report.delta; })
      .def_property_readonly("eps_f",
                             [](const GronwallCertificate& c) { return c.report.eps_f; })
      .def_property_readonly("eps_g",
                             [](const GronwallCertificate& c) { return c.report.eps_g; })
      .def_readonly("per_node_margin", &GronwallCertificate::per_node_margin)
      .def_readonly("min_margin", &GronwallCertificate::min_margin)
      .def_readonly("worst_node", &GronwallCertificate::worst_node)
      .def_readonly("slack_used", &GronwallCertificate::slack_used)
      .def_readonly("pass_", &GronwallCertificate::pass)
      .def_property_readonly("direction", [](const GronwallCertificate& c) {
        return c.direction == Direction::Forward ? "forward" : "backward";
      });
  m.def("certify_pair", &certify_pair, py::arg("f"), py::arg("g"),
        py::arg("field"), py::arg("K"), py::arg("slack") = -1.0);
  m.def("certify_pair_backward", &certify_pair_backward, py::arg("f"),
        py::arg("g"), py::arg("field"), py::arg("K"), py::arg("slack") = -1.0);
  m.def("certify_uniqueness", &certify_uniqueness, py::arg("f"), py::arg("g"),
        py::arg("field"), py::arg("K"), py::arg("tol"),
        py::arg("tol_anchor") = 1e-9);
  m.def("time_reverse", &time_reverse, py::arg("alpha"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init(&make_solver_config), py::arg("n_steps") = 1000,
           py::arg("tol_fix") = 1e-12, py::arg("max_iter") = 80,
           py::arg("rho_switch_factor") = 0.8)
      .def_readwrite("n_steps", &SolverConfig::n_steps)
      .def_readwrite("tol_fix", &SolverConfig::tol_fix)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("rho_switch_factor", &SolverConfig::rho_switch_factor);

  py::class_<ManifoldTrajectory>(m, "ManifoldTrajectoryData")
      .def_readonly("switch_times", &ManifoldTrajectory::switch_times)
      .def_readonly("switch_defects", &ManifoldTrajectory::switch_defects)
      .def("t_begin", &ManifoldTrajectory::t_begin)
      .def("t_end", &ManifoldTrajectory::t_end)
      .def("chart_at", &ManifoldTrajectory::chart_at)
      .def("n_segments", [](const ManifoldTrajectory& t) {
        return t.segments.size();
      });

  py::class_<ConsistencyReport>(m, "ConsistencyReport")
      .def_readonly("max_violation", &ConsistencyReport::max_violation)
      .def_readonly("n_checked", &ConsistencyReport::n_checked)
      .def_readonly("worst_chart_from", &ConsistencyReport::worst_chart_from)
      .def_readonly("worst_chart_to", &ConsistencyReport::worst_chart_to);

  // Builtin manifolds behind a small handle so the atlas plumbing stays in C++.
  py::class_<BuiltinManifold>(m, "Manifold")
      .def_property_readonly("name",
                             [](const BuiltinManifold& m_) { return m_.name; })
      .def(
          "integrate",
          [](const BuiltinManifold& m_, const Vec& p_start, double t_start,
             double t_end, const SolverConfig& cfg) {
            return integrate_on_manifold(m_.field, m_.atlas, p_start, t_start,
                                         t_end, cfg);
          },
          py::arg("p_start"), py::arg("t_start"), py::arg("t_end"),
          py::arg("config") = SolverConfig{})
      .def(
          "ambient_at",
          [](const BuiltinManifold& m_, const ManifoldTrajectory& traj, double t) {
            return traj.ambient_at(m_.atlas, t);
          },
          py::arg("trajectory"), py::arg("t"))
      .def(
          "verify",
          [](const BuiltinManifold& m_, const ManifoldTrajectory& traj, double tol) {
            const DefectResult res = verify_manifold_curve(traj, m_.field, m_.atlas, tol);
            return py::make_tuple(res.max_defect, res.pass);
          },
          py::arg("trajectory"), py::arg("tol"))
      .def(
          "check_consistency",
          [](const BuiltinManifold& m_, int samples, std::uint64_t seed) {
            return check_field_consistency(m_.field, m_.atlas, samples,
                                           JacobianMode::Auto, 1e-5, seed);
          },
          py::arg("samples") = 128, py::arg("seed") = 0)
      .def(
          "certify_uniqueness",
          [](const BuiltinManifold& m_, const Vec& p_start, double t_start,
             double t_end, const SolverConfig& a, const SolverConfig& b,
             double tol) {
            return certify_manifold_uniqueness(m_.field, m_.atlas, p_start,
                                               t_start, t_end, a, b, tol);
          },
          py::arg("p_start"), py::arg("t_start"), py::arg("t_end"),
          py::arg("config_a"), py::arg("config_b"), py::arg("tol"));

  m.def("builtin_circle", &builtin_circle);
  m.def("builtin_sphere", &builtin_sphere);

#ifdef CURVECERT_VERSION
  m.attr("__version__") = CURVECERT_VERSION;
#else
  m.attr("__version__") = kToolVersion;
#endif
}
