#pragma once

#include <cstdint>
#include <stdexcept>

#include "num/problem.hpp"

namespace num {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Random-instance parameters: C entries are Bernoulli(p), capacities are
/// uniform in [b_min, b_max].
struct InstanceSpec {
  int n = 0;
  int m = 0;
  double p = 0.5;
  double b_min = 0.1;
  double b_max = 0.4;
  UtilitySpec utility = UtilitySpec::log_utility();
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic, portable generation from the seed: an mt19937_64 stream
/// mapped to [0,1) via the top 53 bits, consumed in a fixed order (matrix
/// entries row-major, then per-column repair redraws for all-zero user
/// columns in ascending user order, then capacities). Throws GenerationError
/// if 1000 column redraws cannot produce a valid matrix.
NumProblem generate_instance(const InstanceSpec& spec);

}  // namespace num
