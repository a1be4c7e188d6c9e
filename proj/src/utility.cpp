#include "num/utility.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace num {

namespace {

[[noreturn]] void boundary_error(const char* kind, double x) {
  throw std::domain_error(std::string(kind) + " utility requires x > 0, got x = " +
                          std::to_string(x));
}

}  // namespace

UtilitySpec UtilitySpec::log_utility() { return UtilitySpec{UtilityKind::Log, {}, 0.0}; }

UtilitySpec UtilitySpec::weighted_log(std::vector<double> w) {
  return UtilitySpec{UtilityKind::WeightedLog, std::move(w), 0.0};
}

UtilitySpec UtilitySpec::power(double alpha) {
  return UtilitySpec{UtilityKind::Power, {}, alpha};
}

void UtilitySpec::validate(std::size_t n_users) const {
  switch (kind) {
    case UtilityKind::Log:
      return;
    case UtilityKind::WeightedLog:
      if (weights.size() != n_users)
        throw std::invalid_argument("utility weights must have length n = " +
                                    std::to_string(n_users) + ", got " +
                                    std::to_string(weights.size()));
      for (std::size_t k = 0; k < weights.size(); ++k)
        if (!(weights[k] > 0.0))
          throw std::invalid_argument("utility weight " + std::to_string(k) +
                                      " must be strictly positive");
      return;
    case UtilityKind::Power:
      if (!(alpha > 0.0) || alpha == 1.0)
        throw std::invalid_argument("power utility alpha must lie in (0,1) or (1,inf)");
      return;
  }
  throw std::invalid_argument("unknown utility kind");
}

double UtilitySpec::value(std::size_t k, double x) const {
  if (!(x > 0.0)) boundary_error(kind_name(), x);
  switch (kind) {
    case UtilityKind::Log:
      return std::log(x);
    case UtilityKind::WeightedLog:
      return weights[k] * std::log(x);
    case UtilityKind::Power:
      return std::pow(x, 1.0 - alpha) / (1.0 - alpha);
  }
  return 0.0;
}

double UtilitySpec::slope(std::size_t k, double x) const {
  if (!(x > 0.0)) boundary_error(kind_name(), x);
  switch (kind) {
    case UtilityKind::Log:
      return 1.0 / x;
    case UtilityKind::WeightedLog:
      return weights[k] / x;
    case UtilityKind::Power:
      return std::pow(x, -alpha);
  }
  return 0.0;
}

double UtilitySpec::inverse_slope(std::size_t k, double q) const {
  switch (kind) {
    case UtilityKind::Log:
      return 1.0 / q;
    case UtilityKind::WeightedLog:
      return weights[k] / q;
    case UtilityKind::Power:
      return std::pow(q, -1.0 / alpha);
  }
  return 0.0;
}

double UtilitySpec::inverse_slope_derivative(std::size_t k, double q) const {
  switch (kind) {
    case UtilityKind::Log:
      return -1.0 / (q * q);
    case UtilityKind::WeightedLog:
      return -weights[k] / (q * q);
    case UtilityKind::Power:
      return (-1.0 / alpha) * std::pow(q, -1.0 / alpha - 1.0);
  }
  return 0.0;
}

const char* UtilitySpec::kind_name() const {
  switch (kind) {
    case UtilityKind::Log:
      return "log";
    case UtilityKind::WeightedLog:
      return "weighted_log";
    case UtilityKind::Power:
      return "power";
  }
  return "?";
}

}  // namespace num
