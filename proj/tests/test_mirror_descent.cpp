#include <doctest.h>

#include <cmath>
#include <random>

#include "num/generator.hpp"
#include "num/mirror_descent.hpp"
#include "num/oracle.hpp"
#include "test_helpers.hpp"

using namespace num;
using numtest::two_user_instance;

namespace {

long long expected_fixed_count(double theta0, double eps) {
  return static_cast<long long>(std::ceil(2.0 * theta0 * theta0 / (eps * eps) - 1e-9));
}

}  // namespace

TEST_CASE("projection onto the shifted box") {
  CHECK(project({-1.0, 2.0}, 0.0) == Vec{0.0, 2.0});
  CHECK(project({0.001, 5.0}, 0.01) == Vec{0.01, 5.0});
  Vec feasible{0.5, 0.7};
  CHECK(project(feasible, 0.1) == feasible);
  CHECK(project(project({-3.0, 0.2}, 0.1), 0.1) == project({-3.0, 0.2}, 0.1));
}

TEST_CASE("directional gap diagnostic") {
  NumProblem p = two_user_instance();
  Vec xstar{0.5, 0.5};
  CHECK(directional_gap(p, xstar, xstar) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(directional_gap(p, Vec{1.0, 1.0}, xstar) ==
        doctest::Approx(-1.0 / std::sqrt(2.0)));

  // convexity: v_f(y, x*) >= (f(y) - f(x*)) / ||grad f(y)||
  std::mt19937_64 rng(3);
  double fstar = eval_objective(p, xstar);
  for (int trial = 0; trial < 100; ++trial) {
    Vec y = numtest::random_point(rng, 2, 0.05, 3.0);
    double gn = numtest::norm2(grad_objective(p, y));
    CHECK(directional_gap(p, y, xstar) >=
          (eval_objective(p, y) - fstar) / gn - 1e-9);
  }
}

TEST_CASE("md1 runs exactly the fixed budget and quadruples when eps halves") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.mode = MdMode::Standard;
  cfg.start = Vec{0.4, 0.4};
  cfg.theta0 = 1.0;
  cfg.eps = 0.2;
  MdReport coarse = run_md1(p, cfg);
  CHECK(coarse.total_iters == expected_fixed_count(1.0, 0.2));
  CHECK(coarse.total_iters == coarse.productive_count + coarse.unproductive_count);

  cfg.eps = 0.1;
  MdReport fine = run_md1(p, cfg);
  CHECK(fine.total_iters == 4 * coarse.total_iters);
  CHECK(fine.stop_reason == StopReason::CriterionMet);
  CHECK(fine.productive_count >= 1);
}

TEST_CASE("md1 log-shift solves the closed-form split") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 0.01;
  cfg.theta0 = 1.0;
  cfg.mode = MdMode::LogShift;
  MdReport report = run_md1(p, cfg);
  const double ustar = -2.0 * std::log(2.0);
  CHECK(report.stop_reason == StopReason::CriterionMet);
  CHECK(report.total_iters == 200'000'000);  // ceil(2*1/eps^4)
  CHECK(report.productive_count >= 1);
  CHECK(std::fabs(report.solution[0] - 0.5) <= 0.05);
  CHECK(std::fabs(report.solution[1] - 0.5) <= 0.05);
  CHECK(report.objective - (-ustar) <= cfg.eps + 1e-9);  // eps objective gap
  // productive iterates may sit up to eps*M_g outside, so f can undershoot f*
  // by at most ||lambda*|| * eps * M_g
  CHECK(report.objective - (-ustar) >= -2.0 * cfg.eps * std::sqrt(2.0) - 1e-9);
  CHECK(report.max_productive_scaled_violation <= cfg.eps + 1e-12);
}

TEST_CASE("md2 log-shift approximates the closed-form split") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 0.01;
  cfg.mode = MdMode::LogShift;
  MdReport report = run_md2(p, cfg);
  const double ustar = -2.0 * std::log(2.0);
  CHECK(report.stop_reason == StopReason::CriterionMet);
  CHECK(std::fabs(report.utility - ustar) <= 0.02);
  CHECK(report.max_violation <= cfg.eps * std::sqrt(2.0) + 1e-12);
  CHECK(report.max_violation <= cfg.eps * p.constraint_lipschitz() + 1e-12);

  // iteration bound with the realized max productive gradient norm
  double mf2 = std::max(1.0, report.max_productive_grad_norm *
                                 report.max_productive_grad_norm);
  double bound = std::ceil(2.0 * report.theta0_used * report.theta0_used * mf2 /
                           (cfg.eps * cfg.eps));
  CHECK(static_cast<double>(report.total_iters) <= bound);
}

TEST_CASE("md2 with slack capacities takes productive steps only") {
  NumProblem p(RoutingMatrix(2, {{0, 1}}), {1e6}, UtilitySpec::log_utility());
  MdConfig cfg;
  cfg.eps = 0.05;
  cfg.theta0 = 0.5;
  cfg.mode = MdMode::LogShift;
  MdReport report = run_md2(p, cfg);
  CHECK(report.unproductive_count == 0);
  CHECK(report.stop_reason == StopReason::CriterionMet);
  CHECK(report.criterion_sum >= report.criterion_threshold);
}

TEST_CASE("step-size laws hold exactly on the trace") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 0.05;
  cfg.theta0 = 0.4;
  cfg.trace_every = 1;

  SUBCASE("md1 standard") {
    cfg.mode = MdMode::Standard;
    cfg.start = Vec{0.4, 0.4};
    MdReport r = run_md1(p, cfg);
    REQUIRE(!r.trace.empty());
    for (const auto& s : r.trace) {
      double law = s.step_size * s.grad_norm;
      CHECK(law == doctest::Approx(cfg.eps).epsilon(1e-12));
    }
  }
  SUBCASE("md1 log-shift uses eps^2 steps") {
    cfg.mode = MdMode::LogShift;
    MdReport r = run_md1(p, cfg);
    REQUIRE(!r.trace.empty());
    for (const auto& s : r.trace) {
      double law = s.step_size * s.grad_norm;
      CHECK(law == doctest::Approx(cfg.eps * cfg.eps).epsilon(1e-12));
      for (double v : s.x) CHECK(v >= cfg.eps * 2.0);  // floor eps*n, exact
    }
  }
  SUBCASE("md2 productive steps scale with the squared norm") {
    cfg.mode = MdMode::LogShift;
    MdReport r = run_md2(p, cfg);
    REQUIRE(!r.trace.empty());
    for (const auto& s : r.trace) {
      if (s.productive) {
        CHECK(s.step_size * s.grad_norm * s.grad_norm ==
              doctest::Approx(cfg.eps).epsilon(1e-12));
      } else {
        CHECK(s.step_size * s.grad_norm == doctest::Approx(cfg.eps).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("productive iterates satisfy the adaptive constraint test") {
  NumProblem p(RoutingMatrix(3, {{0, 1}, {1, 2}}), {0.8, 0.6},
               UtilitySpec::log_utility());
  MdConfig cfg;
  cfg.eps = 0.02;
  cfg.theta0 = 0.6;
  cfg.mode = MdMode::LogShift;
  cfg.trace_every = 1;
  MdReport r = run_md2(p, cfg);
  for (const auto& s : r.trace) {
    if (!s.productive) continue;
    for (std::size_t j = 0; j < p.links(); ++j) {
      double g = p.routing().load(j, s.x) - p.capacities()[j];
      CHECK(g <= cfg.eps * p.routing().row_norm(j) + 1e-12);
    }
  }
  CHECK(r.max_productive_scaled_violation <= cfg.eps + 1e-12);
}

TEST_CASE("md2 output equals the h-weighted mean of traced productive iterates") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 0.03;
  cfg.theta0 = 0.5;
  cfg.mode = MdMode::LogShift;
  cfg.trace_every = 1;
  MdReport r = run_md2(p, cfg);
  REQUIRE(r.stop_reason == StopReason::CriterionMet);
  Vec acc(p.users(), 0.0);
  long double wsum = 0.0;
  for (const auto& s : r.trace) {
    if (!s.productive) continue;
    wsum += s.step_size;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += s.step_size * s.x[k];
  }
  REQUIRE(wsum > 0.0);
  for (std::size_t k = 0; k < acc.size(); ++k) {
    double mean = static_cast<double>(acc[k] / wsum);
    CHECK(r.solution[k] == doctest::Approx(mean).epsilon(1e-10));
  }
}

TEST_CASE("md2 stops at the first crossing of the adaptive criterion") {
  NumProblem p(RoutingMatrix(3, {{0, 1}, {1, 2}}), {0.9, 0.7},
               UtilitySpec::log_utility());
  MdConfig cfg;
  cfg.eps = 0.02;
  cfg.theta0 = 0.8;
  cfg.mode = MdMode::LogShift;
  cfg.trace_every = 1;
  MdReport r = run_md2(p, cfg);
  REQUIRE(r.stop_reason == StopReason::CriterionMet);
  REQUIRE(static_cast<long long>(r.trace.size()) == r.total_iters);
  double threshold = 2.0 * cfg.theta0.value() * cfg.theta0.value() / (cfg.eps * cfg.eps);
  double sum = 0.0;
  for (long long i = 0; i < r.total_iters; ++i) {
    CHECK(sum < threshold);  // criterion must not have held earlier
    const auto& s = r.trace[static_cast<std::size_t>(i)];
    if (s.productive)
      sum += 1.0 / (s.grad_norm * s.grad_norm);
    else
      sum += 1.0;
  }
  CHECK(sum >= threshold);
  CHECK(sum == doctest::Approx(r.criterion_sum).epsilon(1e-12));
}

TEST_CASE("determinism: identical configs produce identical runs") {
  InstanceSpec spec;
  spec.n = 4;
  spec.m = 3;
  spec.b_min = 0.5;
  spec.b_max = 1.5;
  spec.seed = 99;
  NumProblem p = generate_instance(spec);
  MdConfig cfg;
  cfg.eps = 5e-3;
  cfg.mode = MdMode::LogShift;
  MdReport a = run_md2(p, cfg);
  MdReport b = run_md2(p, cfg);
  CHECK(a.solution == b.solution);
  CHECK(a.total_iters == b.total_iters);
  CHECK(a.productive_count == b.productive_count);
  CHECK(a.objective == b.objective);
}

TEST_CASE("md reports cap_hit when the user cap binds") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 1e-3;
  cfg.mode = MdMode::LogShift;
  cfg.max_iters_cap = 50;
  MdReport r = run_md2(p, cfg);
  CHECK(r.stop_reason == StopReason::CapHit);
  CHECK(r.total_iters == 50);
}

TEST_CASE("shift-infeasible instances report no productive steps") {
  // floor = eps*n = 0.02: load 0.04 leaves g = 0.02 > eps*sqrt(2) at every iterate
  NumProblem p(RoutingMatrix(2, {{0, 1}}), {0.02}, UtilitySpec::log_utility());
  MdConfig cfg;
  cfg.eps = 0.01;
  cfg.theta0 = 0.1;
  cfg.mode = MdMode::LogShift;
  MdReport r = run_md2(p, cfg);
  CHECK(r.stop_reason == StopReason::NoProductiveSteps);
  CHECK(r.productive_count == 0);
  CHECK(r.unproductive_count == r.total_iters);
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings[0].find("capacity-infeasible") != std::string::npos);
  CHECK(r.unproductive_by_link[0] == r.total_iters);  // smallest-index policy
}

TEST_CASE("standard mode from the written zero start rejects log utilities") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 0.1;
  cfg.mode = MdMode::Standard;
  CHECK_THROWS_AS(run_md1(p, cfg), std::domain_error);
}

TEST_CASE("md config validation") {
  NumProblem p = two_user_instance();
  MdConfig cfg;
  cfg.eps = 0.0;
  CHECK_THROWS_AS(run_md2(p, cfg), std::invalid_argument);
  cfg.eps = 0.1;
  cfg.theta0 = -1.0;
  CHECK_THROWS_AS(run_md2(p, cfg), std::invalid_argument);
  cfg.theta0 = 1.0;
  cfg.start = Vec{1.0};
  CHECK_THROWS_AS(run_md2(p, cfg), std::invalid_argument);
}

TEST_CASE("both variants reach the oracle optimum on tiny random instances") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    InstanceSpec spec;
    spec.n = 3 + static_cast<int>(seed % 2);
    spec.m = 2;
    spec.b_min = 0.5;
    spec.b_max = 1.5;
    spec.seed = seed;
    NumProblem p = generate_instance(spec);
    OracleSolution oracle = reference_solution(p);

    MdConfig cfg;
    cfg.eps = 1e-3;
    cfg.mode = MdMode::LogShift;
    MdReport adaptive = run_md2(p, cfg);
    CHECK(oracle.utility - adaptive.utility <= 5.0 * cfg.eps);
    CHECK(adaptive.max_violation <= cfg.eps * p.constraint_lipschitz() + 1e-12);

    // fixed-budget variant with a tight valid theta0 derived from the oracle
    MdConfig fixed;
    fixed.eps = 2e-2;
    fixed.mode = MdMode::LogShift;
    double dist2 = 0.0;
    double floor = fixed.eps * static_cast<double>(p.users());
    for (std::size_t k = 0; k < p.users(); ++k)
      dist2 += (floor - oracle.x[k]) * (floor - oracle.x[k]);
    fixed.theta0 = 1.1 * std::sqrt(0.5 * dist2);
    MdReport budget = run_md1(p, fixed);
    CHECK(budget.productive_count >= 1);
    CHECK(budget.objective - (-oracle.utility) <= fixed.eps + 1e-9);
  }
}

TEST_CASE("most-violated row selection is available as a policy") {
  // two rows violated at the start; the second is worse
  NumProblem p(RoutingMatrix(3, {{0, 1}, {0, 1, 2}}), {0.04, 0.05},
               UtilitySpec::log_utility());
  MdConfig cfg;
  cfg.eps = 0.01;
  cfg.theta0 = 0.3;
  cfg.mode = MdMode::LogShift;  // floor 0.03: loads 0.06 and 0.09, excesses 0.02 and 0.04
  cfg.trace_every = 1;
  cfg.max_iters_cap = 4;

  cfg.pick = ConstraintPick::SmallestIndex;
  MdReport smallest = run_md2(p, cfg);
  REQUIRE(!smallest.trace.empty());
  CHECK(smallest.trace[0].row == 0);

  cfg.pick = ConstraintPick::MostViolated;
  MdReport worst = run_md2(p, cfg);
  REQUIRE(!worst.trace.empty());
  CHECK(worst.trace[0].row == 1);  // excess 0.03 > 0.01
}
