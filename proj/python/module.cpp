#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "num/bench.hpp"
#include "num/ellipsoid.hpp"
#include "num/generator.hpp"
#include "num/mirror_descent.hpp"
#include "num/oracle.hpp"
#include "num/problem_io.hpp"

namespace py = pybind11;

namespace {

num::UtilitySpec utility_from_args(const std::string& kind,
                                   const std::optional<std::vector<double>>& weights,
                                   std::optional<double> alpha) {
  if (kind == "log") return num::UtilitySpec::log_utility();
  if (kind == "weighted_log") {
    if (!weights) throw std::invalid_argument("weighted_log utility needs weights");
    return num::UtilitySpec::weighted_log(*weights);
  }
  if (kind == "power") {
    if (!alpha) throw std::invalid_argument("power utility needs alpha");
    return num::UtilitySpec::power(*alpha);
  }
  throw std::invalid_argument("unknown utility kind: " + kind);
}

num::MdConfig md_config(double eps, std::optional<double> theta0, const std::string& mode,
                        std::optional<std::vector<double>> start,
                        std::optional<long long> max_iters_cap, long long trace_every) {
  num::MdConfig cfg;
  cfg.eps = eps;
  cfg.theta0 = theta0;
  if (mode == "standard")
    cfg.mode = num::MdMode::Standard;
  else if (mode == "log-shift" || mode == "log_shift")
    cfg.mode = num::MdMode::LogShift;
  else
    throw std::invalid_argument("mode must be standard or log-shift");
  cfg.start = std::move(start);
  cfg.max_iters_cap = max_iters_cap;
  cfg.trace_every = trace_every;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Network utility maximization: mirror-descent and dual-ellipsoid solvers";

  py::class_<num::NumProblem>(m, "Problem")
      .def_property_readonly("n", &num::NumProblem::users)
      .def_property_readonly("m", &num::NumProblem::links)
      .def_property_readonly("capacities", &num::NumProblem::capacities)
      .def_property_readonly("constraint_lipschitz", &num::NumProblem::constraint_lipschitz)
      .def("row", [](const num::NumProblem& p, std::size_t j) { return p.routing().row(j); })
      .def("to_json", [](const num::NumProblem& p) { return num::problem_to_json(p).dump(); })
      .def("__repr__", [](const num::NumProblem& p) {
        return "<numbench.Problem n=" + std::to_string(p.users()) +
               " m=" + std::to_string(p.links()) + " utility=" + p.utility().kind_name() +
               ">";
      });

  m.def(
      "load_problem", [](const std::string& path) { return num::load_problem(path); },
      py::arg("path"));
  m.def(
      "problem_from_json",
      [](const std::string& text) { return num::problem_from_json(nlohmann::json::parse(text)); },
      py::arg("text"));
  m.def(
      "make_problem",
      [](std::size_t n, const std::vector<std::vector<int>>& rows, std::vector<double> b,
         const std::string& utility, std::optional<std::vector<double>> weights,
         std::optional<double> alpha) {
        return num::NumProblem(num::RoutingMatrix(n, rows), std::move(b),
                               utility_from_args(utility, weights, alpha));
      },
      py::arg("n"), py::arg("rows"), py::arg("b"), py::arg("utility") = "log",
      py::arg("weights") = std::nullopt, py::arg("alpha") = std::nullopt);
  m.def(
      "generate",
      [](int n, int m_links, double p, double b_min, double b_max, std::uint64_t seed,
         const std::string& utility, std::optional<std::vector<double>> weights,
         std::optional<double> alpha) {
        num::InstanceSpec spec;
        spec.n = n;
        spec.m = m_links;
        spec.p = p;
        spec.b_min = b_min;
        spec.b_max = b_max;
        spec.seed = seed;
        spec.utility = utility_from_args(utility, weights, alpha);
        return num::generate_instance(spec);
      },
      py::arg("n"), py::arg("m"), py::arg("p") = 0.5, py::arg("b_min") = 0.1,
      py::arg("b_max") = 0.4, py::arg("seed") = 0, py::arg("utility") = "log",
      py::arg("weights") = std::nullopt, py::arg("alpha") = std::nullopt);

  using DVec = std::vector<double>;
  m.def(
      "eval_objective",
      [](const num::NumProblem& p, const DVec& x) { return num::eval_objective(p, x); },
      py::arg("problem"), py::arg("x"));
  m.def(
      "eval_utility",
      [](const num::NumProblem& p, const DVec& x) { return num::eval_utility(p, x); },
      py::arg("problem"), py::arg("x"));
  m.def(
      "grad_objective",
      [](const num::NumProblem& p, const DVec& x) { return num::grad_objective(p, x); },
      py::arg("problem"), py::arg("x"));
  m.def(
      "eval_constraint",
      [](const num::NumProblem& p, std::size_t j, const DVec& x) {
        return num::eval_constraint(p, j, x);
      },
      py::arg("problem"), py::arg("j"), py::arg("x"));
  m.def(
      "max_violation",
      [](const num::NumProblem& p, const DVec& x) { return num::max_violation(p, x); },
      py::arg("problem"), py::arg("x"));
  m.def(
      "find_violated",
      [](const num::NumProblem& p, const DVec& x, double eps) {
        return num::find_violated(p, x, eps);
      },
      py::arg("problem"), py::arg("x"), py::arg("eps"));
  m.def(
      "directional_gap",
      [](const num::NumProblem& p, const DVec& y, const DVec& x_ref) {
        return num::directional_gap(p, y, x_ref);
      },
      py::arg("problem"), py::arg("y"), py::arg("x_ref"));

  py::class_<num::MdReport>(m, "MdReport")
      .def_readonly("solution", &num::MdReport::solution)
      .def_readonly("objective", &num::MdReport::objective)
      .def_readonly("utility", &num::MdReport::utility)
      .def_readonly("max_violation", &num::MdReport::max_violation)
      .def_readonly("total_iters", &num::MdReport::total_iters)
      .def_readonly("productive_count", &num::MdReport::productive_count)
      .def_readonly("unproductive_count", &num::MdReport::unproductive_count)
      .def_readonly("unproductive_by_link", &num::MdReport::unproductive_by_link)
      .def_readonly("wall_time_ms", &num::MdReport::wall_time_ms)
      .def_readonly("theta0_used", &num::MdReport::theta0_used)
      .def_readonly("max_productive_grad_norm", &num::MdReport::max_productive_grad_norm)
      .def_readonly("warnings", &num::MdReport::warnings)
      .def_property_readonly("stop_reason", [](const num::MdReport& r) {
        return std::string(num::to_string(r.stop_reason));
      });

  m.def(
      "solve_md1",
      [](const num::NumProblem& p, double eps, std::optional<double> theta0,
         const std::string& mode, std::optional<std::vector<double>> start,
         std::optional<long long> max_iters_cap, long long trace_every) {
        return num::run_md1(p, md_config(eps, theta0, mode, std::move(start), max_iters_cap,
                                         trace_every));
      },
      py::arg("problem"), py::arg("eps"), py::arg("theta0") = std::nullopt,
      py::arg("mode") = "log-shift", py::arg("start") = std::nullopt,
      py::arg("max_iters_cap") = std::nullopt, py::arg("trace_every") = 0);
  m.def(
      "solve_md2",
      [](const num::NumProblem& p, double eps, std::optional<double> theta0,
         const std::string& mode, std::optional<std::vector<double>> start,
         std::optional<long long> max_iters_cap, long long trace_every) {
        return num::run_md2(p, md_config(eps, theta0, mode, std::move(start), max_iters_cap,
                                         trace_every));
      },
      py::arg("problem"), py::arg("eps"), py::arg("theta0") = std::nullopt,
      py::arg("mode") = "log-shift", py::arg("start") = std::nullopt,
      py::arg("max_iters_cap") = std::nullopt, py::arg("trace_every") = 0);

  py::class_<num::EmReport>(m, "EmReport")
      .def_readonly("lambda_", &num::EmReport::lambda)
      .def_readonly("dual_value", &num::EmReport::dual_value)
      .def_readonly("recovered_x", &num::EmReport::recovered_x)
      .def_readonly("primal_utility", &num::EmReport::primal_utility)
      .def_readonly("violation_norm", &num::EmReport::violation_norm)
      .def_readonly("max_violation", &num::EmReport::max_violation)
      .def_readonly("gap", &num::EmReport::gap)
      .def_readonly("iterations", &num::EmReport::iterations)
      .def_readonly("budget", &num::EmReport::budget)
      .def_readonly("wall_time_ms", &num::EmReport::wall_time_ms)
      .def_readonly("certificate_support", &num::EmReport::certificate_support)
      .def_property_readonly("stop_reason", [](const num::EmReport& r) {
        return std::string(num::to_string(r.stop_reason));
      });

  m.def(
      "solve_em",
      [](const num::NumProblem& p, double eps, std::optional<double> radius,
         std::optional<double> grad_bound, std::optional<std::vector<double>> lambda0,
         std::optional<long long> max_iters, const std::string& direction) {
        num::EmConfig cfg;
        cfg.eps = eps;
        cfg.radius = radius;
        cfg.grad_bound = grad_bound;
        cfg.lambda0 = std::move(lambda0);
        cfg.max_iters = max_iters;
        cfg.direction =
            direction == "paper" ? num::EmDirection::Paper : num::EmDirection::Standard;
        return num::em_run(p, cfg);
      },
      py::arg("problem"), py::arg("eps"), py::arg("radius") = std::nullopt,
      py::arg("grad_bound") = std::nullopt, py::arg("lambda0") = std::nullopt,
      py::arg("max_iters") = std::nullopt, py::arg("direction") = "standard");

  m.def(
      "best_response",
      [](const num::NumProblem& p, std::size_t k, double price) {
        return num::best_response(p, k, price);
      },
      py::arg("problem"), py::arg("k"), py::arg("price"));
  m.def(
      "dual_value",
      [](const num::NumProblem& p, const std::vector<double>& lam) {
        return num::dual_value(p, lam);
      },
      py::arg("problem"), py::arg("lambda_"));
  m.def(
      "dual_subgradient",
      [](const num::NumProblem& p, const std::vector<double>& lam) {
        return num::dual_subgradient(p, lam);
      },
      py::arg("problem"), py::arg("lambda_"));
  m.def(
      "duality_gap",
      [](const num::NumProblem& p, const DVec& x, const DVec& lam) {
        return num::duality_gap(p, x, lam);
      },
      py::arg("problem"), py::arg("x"), py::arg("lambda_"));

  m.def(
      "reference_solution",
      [](const num::NumProblem& p) {
        num::OracleSolution sol = num::reference_solution(p);
        return py::make_tuple(sol.x, sol.lambda, sol.utility);
      },
      py::arg("problem"),
      "Exact (x*, lambda*, U*) for tiny instances (n <= 6, m <= 4).");

  py::register_exception<num::OracleGuardError>(m, "OracleGuardError");
  py::register_exception<num::GenerationError>(m, "GenerationError");
}
