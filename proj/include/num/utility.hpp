#pragma once

#include <cstddef>
#include <vector>

namespace num {

enum class UtilityKind { Log, WeightedLog, Power };

/// Per-user concave utility family.
///
/// Log and weighted-log are u_k(x) = log x and w_k log x; the power family is
/// u_k(x) = x^(1-alpha)/(1-alpha) with alpha in (0,1) or (1,inf). All three are
/// strictly concave and increasing on x > 0, and all three reject the boundary:
/// value() and slope() throw std::domain_error for x <= 0.
struct UtilitySpec {
  UtilityKind kind = UtilityKind::Log;
  std::vector<double> weights;  // weighted-log only, one positive weight per user
  double alpha = 0.0;           // power only

  static UtilitySpec log_utility();
  static UtilitySpec weighted_log(std::vector<double> w);
  static UtilitySpec power(double alpha);

  /// Throws std::invalid_argument naming the violated requirement.
  void validate(std::size_t n_users) const;

  double value(std::size_t k, double x) const;
  /// u_k'(x); strictly positive on x > 0.
  double slope(std::size_t k, double x) const;
  /// Solves u_k'(x) = q for x; q must be positive.
  double inverse_slope(std::size_t k, double q) const;
  /// Derivative of inverse_slope with respect to q (used by the KKT oracle).
  double inverse_slope_derivative(std::size_t k, double q) const;

  const char* kind_name() const;
};

}  // namespace num
