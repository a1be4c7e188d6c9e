#pragma once

#include <optional>
#include <span>
#include <vector>

#include "num/routing.hpp"
#include "num/utility.hpp"

namespace num {

using Vec = std::vector<double>;

/// One NUM instance: maximize sum_k u_k(x_k) subject to Cx <= b, x >= 0.
///
/// Immutable after construction and safe to share across concurrent solver
/// runs; every oracle below is a pure function of (problem, point).
class NumProblem {
 public:
  NumProblem(RoutingMatrix routing, Vec b, UtilitySpec utility);

  std::size_t users() const { return routing_.users(); }
  std::size_t links() const { return routing_.links(); }
  const RoutingMatrix& routing() const { return routing_; }
  const Vec& capacities() const { return b_; }
  const UtilitySpec& utility() const { return utility_; }

  /// M_g = max_j ||C_j||_2
  double constraint_lipschitz() const { return routing_.max_row_norm(); }
  double max_capacity() const { return b_max_; }
  double min_capacity() const { return b_min_; }

 private:
  RoutingMatrix routing_;
  Vec b_;
  UtilitySpec utility_;
  double b_max_ = 0.0;
  double b_min_ = 0.0;
};

/// U(x) = sum_k u_k(x_k); requires x strictly inside the utility domain.
double eval_utility(const NumProblem& p, std::span<const double> x);

/// f(x) = -U(x), the minimization objective.
double eval_objective(const NumProblem& p, std::span<const double> x);

/// Component k is -u_k'(x_k).
Vec grad_objective(const NumProblem& p, std::span<const double> x);
void grad_objective_into(const NumProblem& p, std::span<const double> x,
                         std::span<double> out);

/// g_j(x) = <C_j, x> - b_j. Throws std::out_of_range for bad j.
double eval_constraint(const NumProblem& p, std::size_t j, std::span<const double> x);

/// max(0, max_j g_j(x)); zero iff x is capacity-feasible.
double max_violation(const NumProblem& p, std::span<const double> x);

/// Smallest j with g_j(x) > eps * ||C_j||_2, or nullopt when all rows pass.
std::optional<std::size_t> find_violated(const NumProblem& p, std::span<const double> x,
                                         double eps);

}  // namespace num
