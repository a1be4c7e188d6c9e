#pragma once

#include <stdexcept>

#include "num/problem.hpp"

namespace num {

struct OracleGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleSolution {
  Vec x;
  Vec lambda;        // full m-vector, zero off the active set
  double utility = 0.0;
};

/// Exhaustive KKT solve for tiny instances (n <= 6, m <= 4; larger instances
/// throw OracleGuardError). Enumerates candidate active sets A, solves the
/// tight system sum_{k in row_j} u'^{-1}(sum_{i in A, i ni k} lambda_i) = b_j
/// by damped Newton (per-row bisection sweeps as fallback), and keeps the
/// feasible candidate with nonnegative multipliers and the best utility.
/// Accurate to ~1e-9 in utility. Independent of every solver code path.
OracleSolution reference_solution(const NumProblem& p);

}  // namespace num
