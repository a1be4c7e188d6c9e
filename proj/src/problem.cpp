#include "num/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace num {

NumProblem::NumProblem(RoutingMatrix routing, Vec b, UtilitySpec utility)
    : routing_(std::move(routing)), b_(std::move(b)), utility_(std::move(utility)) {
  if (b_.size() != routing_.links())
    throw std::invalid_argument("capacity vector length " + std::to_string(b_.size()) +
                                " does not match link count " +
                                std::to_string(routing_.links()));
  for (std::size_t j = 0; j < b_.size(); ++j)
    if (!(b_[j] > 0.0))
      throw std::invalid_argument("capacity b[" + std::to_string(j) +
                                  "] must be strictly positive");
  utility_.validate(routing_.users());
  b_max_ = *std::max_element(b_.begin(), b_.end());
  b_min_ = *std::min_element(b_.begin(), b_.end());
}

double eval_utility(const NumProblem& p, std::span<const double> x) {
  const auto& u = p.utility();
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) total += u.value(k, x[k]);
  return total;
}

double eval_objective(const NumProblem& p, std::span<const double> x) {
  return -eval_utility(p, x);
}

void grad_objective_into(const NumProblem& p, std::span<const double> x,
                         std::span<double> out) {
  const auto& u = p.utility();
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = -u.slope(k, x[k]);
}

Vec grad_objective(const NumProblem& p, std::span<const double> x) {
  Vec g(x.size());
  grad_objective_into(p, x, g);
  return g;
}

double eval_constraint(const NumProblem& p, std::size_t j, std::span<const double> x) {
  if (j >= p.links())
    throw std::out_of_range("link index " + std::to_string(j) + " out of range [0, " +
                            std::to_string(p.links()) + ")");
  return p.routing().load(j, x) - p.capacities()[j];
}

double max_violation(const NumProblem& p, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.links(); ++j) {
    double g = p.routing().load(j, x) - p.capacities()[j];
    if (g > worst) worst = g;
  }
  return worst;
}

std::optional<std::size_t> find_violated(const NumProblem& p, std::span<const double> x,
                                         double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("find_violated requires eps > 0");
  for (std::size_t j = 0; j < p.links(); ++j) {
    double g = p.routing().load(j, x) - p.capacities()[j];
    if (g > eps * p.routing().row_norm(j)) return j;
  }
  return std::nullopt;
}

}  // namespace num
