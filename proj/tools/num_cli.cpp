// num: generate NUM instances, solve them with md1/md2/em, sweep benchmarks,
// and compute exact reference solutions for tiny instances.
//
// Exit codes: 0 success, 2 invalid input, 3 solver stopped with
// no_productive_steps or cap_hit, 4 oracle guard refusal.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "num/bench.hpp"
#include "num/ellipsoid.hpp"
#include "num/generator.hpp"
#include "num/mirror_descent.hpp"
#include "num/oracle.hpp"
#include "num/problem_io.hpp"
#include "num/result_io.hpp"

namespace {

using nlohmann::json;

struct GenArgs {
  int n = 0, m = 0;
  double p = 0.5, b_min = 0.1, b_max = 0.4;
  std::string utility = "log";
  double alpha = 2.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveArgs {
  std::string algo;
  std::string problem;
  double eps = 0.0;
  std::optional<double> theta0;
  std::optional<double> radius;
  std::string mode = "log-shift";
  std::string em_direction = "standard";
  std::string out;
};

struct BenchArgs {
  std::string config;
  std::optional<std::string> format;
  std::optional<int> parallel;
  std::string out;
};

struct OracleArgs {
  std::string problem;
  std::string out;
};

int run_gen(const GenArgs& a) {
  num::InstanceSpec spec;
  spec.n = a.n;
  spec.m = a.m;
  spec.p = a.p;
  spec.b_min = a.b_min;
  spec.b_max = a.b_max;
  spec.seed = a.seed;
  if (a.utility == "log")
    spec.utility = num::UtilitySpec::log_utility();
  else if (a.utility == "power")
    spec.utility = num::UtilitySpec::power(a.alpha);
  else
    throw std::invalid_argument("gen supports --utility log|power (weighted_log via file)");
  num::NumProblem problem = num::generate_instance(spec);
  num::save_problem(a.out, problem, spec.seed);
  return 0;
}

int run_solve(const SolveArgs& a) {
  num::NumProblem problem = num::load_problem(a.problem);
  json result;
  num::StopReason reason = num::StopReason::CriterionMet;
  if (a.algo == "md1" || a.algo == "md2") {
    num::MdConfig cfg;
    cfg.eps = a.eps;
    cfg.theta0 = a.theta0;
    cfg.mode = a.mode == "standard" ? num::MdMode::Standard : num::MdMode::LogShift;
    num::MdReport report =
        a.algo == "md1" ? num::run_md1(problem, cfg) : num::run_md2(problem, cfg);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    reason = report.stop_reason;
    result = num::md_result_to_json(a.algo, report);
  } else if (a.algo == "em") {
    num::EmConfig cfg;
    cfg.eps = a.eps;
    cfg.radius = a.radius;
    cfg.direction = a.em_direction == "paper" ? num::EmDirection::Paper
                                              : num::EmDirection::Standard;
    num::EmReport report = num::em_run(problem, cfg);
    if (report.price_floor_engaged)
      std::cerr << "warning: price floor engaged in best responses\n";
    if (report.rate_cap_engaged)
      std::cerr << "warning: rate cap engaged in best responses\n";
    reason = report.stop_reason;
    result = num::em_result_to_json(report, a.eps);
  } else {
    throw std::invalid_argument("unknown algorithm \"" + a.algo + "\" (md1|md2|em)");
  }
  num::write_result(a.out, result);
  return reason == num::StopReason::CriterionMet ? 0 : 3;
}

int run_bench_cmd(const BenchArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw std::invalid_argument("cannot open bench config: " + a.config);
  json doc;
  in >> doc;
  num::BenchConfig cfg = num::bench_config_from_json(doc);
  if (a.format) cfg.format = num::report_format_from_string(*a.format);
  if (a.parallel) cfg.parallel = *a.parallel;
  auto records = num::run_bench(cfg);
  std::string text = num::emit_report(records, cfg.format);
  std::ofstream out(a.out);
  if (!out) throw std::invalid_argument("cannot write report: " + a.out);
  out << text;
  return 0;
}

int run_oracle(const OracleArgs& a) {
  num::NumProblem problem = num::load_problem(a.problem);
  num::OracleSolution sol = num::reference_solution(problem);
  json doc{{"x", sol.x},
           {"lambda", sol.lambda},
           {"utility", sol.utility},
           {"objective", -sol.utility}};
  num::write_result(a.out, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network utility maximization solvers and benchmark harness"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cgen = app.add_subcommand("gen", "generate a random problem instance");
  cgen->add_option("--n", gen.n, "user count")->required();
  cgen->add_option("--m", gen.m, "link count")->required();
  cgen->add_option("--p", gen.p, "routing entry probability");
  cgen->add_option("--b-min", gen.b_min, "capacity lower bound");
  cgen->add_option("--b-max", gen.b_max, "capacity upper bound");
  cgen->add_option("--utility", gen.utility, "utility family (log|power)");
  cgen->add_option("--alpha", gen.alpha, "power utility exponent");
  cgen->add_option("--seed", gen.seed, "generator seed");
  cgen->add_option("--out", gen.out, "output problem file")->required();

  SolveArgs solve;
  CLI::App* csolve = app.add_subcommand("solve", "run one solver on a problem file");
  csolve->add_option("--algo", solve.algo, "md1|md2|em")->required();
  csolve->add_option("--problem", solve.problem, "problem file")->required();
  csolve->add_option("--eps", solve.eps, "target accuracy")->required();
  csolve->add_option("--theta0", solve.theta0, "distance bound for md1/md2");
  csolve->add_option("--radius", solve.radius, "dual radius R for em");
  csolve->add_option("--mode", solve.mode, "standard|log-shift (md1/md2)")
      ->check(CLI::IsMember({"standard", "log-shift"}));
  csolve->add_option("--em-direction", solve.em_direction, "standard|paper")
      ->check(CLI::IsMember({"standard", "paper"}));
  csolve->add_option("--out", solve.out, "output result file")->required();

  BenchArgs bench;
  CLI::App* cbench = app.add_subcommand("bench", "run a benchmark sweep");
  cbench->add_option("--config", bench.config, "bench config file")->required();
  cbench->add_option("--format", bench.format, "csv|json|markdown");
  cbench->add_option("--parallel", bench.parallel, "cells run concurrently");
  cbench->add_option("--out", bench.out, "output report file")->required();

  OracleArgs oracle;
  CLI::App* coracle =
      app.add_subcommand("oracle", "exact reference solution (tiny instances only)");
  coracle->add_option("--problem", oracle.problem, "problem file")->required();
  coracle->add_option("--out", oracle.out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cgen->parsed()) return run_gen(gen);
    if (csolve->parsed()) return run_solve(solve);
    if (cbench->parsed()) return run_bench_cmd(bench);
    if (coracle->parsed()) return run_oracle(oracle);
  } catch (const num::OracleGuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const num::SingularShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
