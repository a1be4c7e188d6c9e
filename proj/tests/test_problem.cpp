#include <doctest.h>

#include <cmath>
#include <random>

#include "num/problem.hpp"
#include "num/problem_io.hpp"
#include "test_helpers.hpp"

using namespace num;
using numtest::random_point;
using numtest::u01;
using numtest::uniform;

namespace {

NumProblem log_problem(std::size_t n, std::vector<std::vector<int>> rows, Vec b) {
  return NumProblem(RoutingMatrix(n, std::move(rows)), std::move(b),
                    UtilitySpec::log_utility());
}

}  // namespace

TEST_CASE("objective values for log utilities") {
  NumProblem p3 = log_problem(3, {{0, 1, 2}}, {10.0});
  CHECK(eval_objective(p3, Vec{1.0, 1.0, 1.0}) == doctest::Approx(0.0));

  NumProblem p2 = log_problem(2, {{0, 1}}, {10.0});
  const double e = std::exp(1.0);
  CHECK(eval_objective(p2, Vec{e, e}) == doctest::Approx(-2.0));
  CHECK(eval_objective(p2, Vec{0.5, 0.5}) == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("objective rejects the boundary for log and power families") {
  NumProblem p = log_problem(2, {{0, 1}}, {1.0});
  CHECK_THROWS_AS(eval_objective(p, Vec{0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(grad_objective(p, Vec{1.0, -0.5}), std::domain_error);

  NumProblem pow_p(RoutingMatrix(2, {{0, 1}}), {1.0}, UtilitySpec::power(2.0));
  CHECK_THROWS_AS(eval_objective(pow_p, Vec{0.0, 1.0}), std::domain_error);
}

TEST_CASE("gradient components") {
  NumProblem p = log_problem(2, {{0, 1}}, {10.0});
  Vec g = grad_objective(p, Vec{1.0, 1.0});
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(-1.0));
  CHECK(numtest::norm2(g) == doctest::Approx(std::sqrt(2.0)));

  g = grad_objective(p, Vec{2.0, 4.0});
  CHECK(g[0] == doctest::Approx(-0.5));
  CHECK(g[1] == doctest::Approx(-0.25));

  NumProblem w(RoutingMatrix(2, {{0, 1}}), {10.0}, UtilitySpec::weighted_log({3.0, 1.0}));
  g = grad_objective(w, Vec{1.0, 1.0});
  CHECK(g[0] == doctest::Approx(-3.0));
  CHECK(g[1] == doctest::Approx(-1.0));
}

TEST_CASE("gradient matches central finite differences per utility kind") {
  auto check_kind = [](const UtilitySpec& u) {
    NumProblem p(RoutingMatrix(3, {{0, 1, 2}}), {100.0}, u);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = random_point(rng, 3, 0.2, 3.0);
      Vec g = grad_objective(p, x);
      for (std::size_t k = 0; k < 3; ++k) {
        double h = 1e-6 * std::max(1.0, std::fabs(x[k]));
        Vec hi = x, lo = x;
        hi[k] += h;
        lo[k] -= h;
        double fd = (eval_objective(p, hi) - eval_objective(p, lo)) / (2.0 * h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  };
  check_kind(UtilitySpec::log_utility());
  check_kind(UtilitySpec::weighted_log({0.5, 2.0, 3.0}));
  check_kind(UtilitySpec::power(0.5));
  check_kind(UtilitySpec::power(2.0));
}

TEST_CASE("constraint evaluation") {
  // row holding the first two of three users, b = 0.3
  NumProblem p = log_problem(3, {{0, 1}, {2}}, {0.3, 1.0});
  CHECK(eval_constraint(p, 0, Vec{0.2, 0.2, 0.5}) == doctest::Approx(0.1));  // 0.4 - 0.3
  CHECK(eval_constraint(p, 0, Vec{0.0, 0.0, 0.0}) == doctest::Approx(-0.3));
  CHECK(eval_constraint(p, 1, Vec{0.0, 0.0, 0.0}) == doctest::Approx(-1.0));

  NumProblem single = log_problem(1, {{0}}, {0.1});
  CHECK(eval_constraint(single, 0, Vec{0.1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(eval_constraint(single, 1, Vec{0.1}), std::out_of_range);
}

TEST_CASE("max violation") {
  NumProblem p = log_problem(2, {{0, 1}}, {0.3});
  CHECK(max_violation(p, Vec{0.1, 0.1}) == 0.0);
  CHECK(max_violation(p, Vec{0.2, 0.2}) == doctest::Approx(0.1));
  double small = max_violation(p, Vec{0.2, 0.2});
  double big = max_violation(p, Vec{2.0, 2.0});
  CHECK(big > small);
}

TEST_CASE("find_violated uses exact row norms") {
  NumProblem p = log_problem(2, {{0, 1}}, {0.3});
  CHECK(find_violated(p, Vec{0.1, 0.1}, 0.01) == std::nullopt);
  auto j = find_violated(p, Vec{0.2, 0.2}, 0.01);  // 0.1 > 0.01*sqrt(2)
  REQUIRE(j.has_value());
  CHECK(*j == 0);
  CHECK(find_violated(p, Vec{0.2, 0.2}, 0.1) == std::nullopt);  // 0.1 <= 0.1*sqrt(2)
  CHECK_THROWS_AS(find_violated(p, Vec{0.1, 0.1}, 0.0), std::invalid_argument);
}

TEST_CASE("constraints are affine and Lipschitz with exact row norms") {
  std::mt19937_64 rng(5);
  NumProblem p = log_problem(4, {{0, 2}, {1, 2, 3}, {0, 1, 2, 3}}, {1.0, 2.0, 3.0});
  for (int trial = 0; trial < 200; ++trial) {
    Vec x = random_point(rng, 4, 0.01, 5.0);
    Vec y = random_point(rng, 4, -2.0, 2.0);
    Vec xy(4);
    for (int k = 0; k < 4; ++k) xy[k] = x[k] + y[k];
    for (std::size_t j = 0; j < p.links(); ++j) {
      double lhs = (p.routing().load(j, xy) - p.capacities()[j]) -
                   (p.routing().load(j, x) - p.capacities()[j]);
      double dot = 0.0;
      for (int k : p.routing().row(j)) dot += y[static_cast<std::size_t>(k)];
      CHECK(std::fabs(lhs - dot) <= 1e-12 * std::max(1.0, std::fabs(dot)));

      Vec x2 = random_point(rng, 4, 0.01, 5.0);
      double diff = std::fabs(eval_constraint(p, j, x) - eval_constraint(p, j, x2));
      Vec delta(4);
      for (int k = 0; k < 4; ++k) delta[k] = x[k] - x2[k];
      CHECK(diff <= p.routing().row_norm(j) * numtest::norm2(delta) + 1e-12);
      CHECK(p.routing().row_norm(j) <= p.constraint_lipschitz() + 1e-15);
    }
  }
  CHECK(p.constraint_lipschitz() <= std::sqrt(4.0) + 1e-15);
}

TEST_CASE("utilities are strictly concave and increasing") {
  std::mt19937_64 rng(17);
  auto check_kind = [&](const UtilitySpec& u, std::size_t n) {
    for (int trial = 0; trial < 200; ++trial) {
      std::size_t k = static_cast<std::size_t>(rng() % n);
      double a = uniform(rng, 1e-3, 10.0), b = uniform(rng, 1e-3, 10.0);
      if (a == b) continue;
      double mid = u.value(k, 0.5 * (a + b));
      CHECK(mid >= 0.5 * (u.value(k, a) + u.value(k, b)) - 1e-12);
      CHECK(u.slope(k, uniform(rng, 1e-3, 10.0)) > 0.0);
    }
  };
  check_kind(UtilitySpec::log_utility(), 2);
  check_kind(UtilitySpec::weighted_log({1.5, 0.25}), 2);
  check_kind(UtilitySpec::power(0.3), 2);
  check_kind(UtilitySpec::power(3.0), 2);
}

TEST_CASE("total utility concavity witness") {
  NumProblem p = log_problem(3, {{0, 1, 2}}, {10.0});
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x1 = random_point(rng, 3, 0.01, 4.0);
    Vec x2 = random_point(rng, 3, 0.01, 4.0);
    Vec mid(3);
    for (int k = 0; k < 3; ++k) mid[k] = 0.5 * (x1[k] + x2[k]);
    CHECK(eval_utility(p, mid) >=
          0.5 * (eval_utility(p, x1) + eval_utility(p, x2)) - 1e-12);
  }
}

TEST_CASE("type validation errors") {
  CHECK_THROWS_AS(UtilitySpec::weighted_log({1.0}).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(UtilitySpec::weighted_log({1.0, -1.0}).validate(2),
                  std::invalid_argument);
  CHECK_THROWS_AS(UtilitySpec::power(1.0).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(UtilitySpec::power(-0.5).validate(2), std::invalid_argument);

  CHECK_THROWS_WITH_AS(RoutingMatrix(2, {{0}}), doctest::Contains("zero column"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(RoutingMatrix(2, {{0, 2}}), doctest::Contains("out of range"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(RoutingMatrix(2, {{1, 0}}),
                       doctest::Contains("strictly increasing"), std::invalid_argument);

  CHECK_THROWS_WITH_AS(
      NumProblem(RoutingMatrix(2, {{0, 1}}), {0.0}, UtilitySpec::log_utility()),
      doctest::Contains("strictly positive"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      NumProblem(RoutingMatrix(2, {{0, 1}}), {1.0, 2.0}, UtilitySpec::log_utility()),
      doctest::Contains("does not match"), std::invalid_argument);
}

TEST_CASE("problem json round trip and loader validation") {
  NumProblem p(RoutingMatrix(3, {{0, 1}, {1, 2}}), {0.5, 0.7},
               UtilitySpec::weighted_log({1.0, 2.0, 3.0}));
  nlohmann::json doc = problem_to_json(p, 42);
  CHECK(doc["seed"] == 42);
  NumProblem q = problem_from_json(doc);
  CHECK(q.users() == 3);
  CHECK(q.links() == 2);
  CHECK(q.capacities() == p.capacities());
  CHECK(q.utility().weights == p.utility().weights);
  CHECK(problem_to_json(q).dump() == problem_to_json(p).dump());

  auto reject = [](const char* text, const char* needle) {
    CHECK_THROWS_WITH_AS(problem_from_json(nlohmann::json::parse(text)),
                         doctest::Contains(needle), std::invalid_argument);
  };
  reject(R"({"m":1,"rows":[[0]],"b":[1.0],"utility":{"kind":"log"}})", "missing field \"n\"");
  reject(R"({"n":2,"m":1,"rows":[[0]],"b":[1.0],"utility":{"kind":"log"}})", "zero column");
  reject(R"({"n":1,"m":1,"rows":[[0]],"b":[-1.0],"utility":{"kind":"log"}})",
         "strictly positive");
  reject(R"({"n":1,"m":2,"rows":[[0]],"b":[1.0,1.0],"utility":{"kind":"log"}})",
         "array of m");
  reject(R"({"n":1,"m":1,"rows":[[0]],"b":[1.0],"utility":{"kind":"cubic"}})",
         "unknown utility kind");
  reject(R"({"n":2,"m":1,"rows":[[0,1]],"b":[1.0],"utility":{"kind":"weighted_log","weights":[1.0]}})",
         "length n");
}
