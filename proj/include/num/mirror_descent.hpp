#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "num/problem.hpp"

namespace num {

enum class MdMode { Standard, LogShift };
enum class ConstraintPick { SmallestIndex, MostViolated };
enum class StopReason { CriterionMet, CapHit, NoProductiveSteps };

const char* to_string(MdMode mode);
const char* to_string(StopReason reason);

/// Shared configuration for both mirror-descent variants.
///
/// In LogShift mode the feasible box is shifted to x >= eps*n so that log-type
/// utilities become Lipschitz (constant 1/eps) on the iterate region; the
/// default start is the shifted corner (eps*n, ..., eps*n). In Standard mode
/// iterates live on the nonnegative orthant and the default start is 0, which
/// log-family utilities reject at the first objective-gradient evaluation.
struct MdConfig {
  double eps = 0.0;
  /// Bound with 0.5*||x0 - x*||^2 <= theta0^2. Default: sqrt(n/2)*max_j b_j,
  /// valid for any start in [0, max_j b_j]^n because x*_k <= max_j b_j.
  std::optional<double> theta0;
  MdMode mode = MdMode::LogShift;
  std::optional<Vec> start;
  std::optional<long long> max_iters_cap;  // default: 4x the theoretical stop count
  long long trace_every = 0;               // 0 disables iterate tracing
  ConstraintPick pick = ConstraintPick::SmallestIndex;
};

struct StepTrace {
  long long iter = 0;
  bool productive = false;
  double step_size = 0.0;  // h_k
  double grad_norm = 0.0;  // ||grad f|| on productive steps, ||C_j|| otherwise
  double objective = 0.0;  // productive steps only
  long long row = -1;      // violated row on unproductive steps
  Vec x;                   // iterate snapshot (pre-step)
};

struct MdReport {
  Vec solution;
  double objective = 0.0;  // f at solution
  double utility = 0.0;    // -objective
  double max_violation = 0.0;
  long long total_iters = 0;
  long long productive_count = 0;
  long long unproductive_count = 0;
  std::vector<long long> unproductive_by_link;
  double wall_time_ms = 0.0;
  StopReason stop_reason = StopReason::CriterionMet;

  double eps = 0.0;
  double theta0_used = 0.0;
  MdMode mode = MdMode::Standard;
  /// Realized max ||grad f|| over productive iterates (M_f witness).
  double max_productive_grad_norm = 0.0;
  /// Realized max over productive iterates of max_j g_j / ||C_j||; the
  /// productive test guarantees this stays <= eps.
  double max_productive_scaled_violation = 0.0;
  /// Fixed-budget runs: planned iteration count; adaptive runs: 0.
  long long planned_iters = 0;
  /// Adaptive runs: final stop sum and its threshold 2*theta0^2/eps^2.
  double criterion_sum = 0.0;
  double criterion_threshold = 0.0;

  std::vector<StepTrace> trace;
  std::vector<std::string> warnings;
};

/// Componentwise max(x_k, floor).
Vec project(Vec x, double floor);

/// Fixed-budget variant: runs exactly ceil(2*theta0^2/eps^2) iterations
/// (ceil(2*theta0^2/eps^4) in LogShift mode, where steps use eps^2), stepping
/// against the objective gradient on productive iterations and against the
/// first violated row otherwise; returns the productive iterate with the
/// smallest objective.
MdReport run_md1(const NumProblem& p, const MdConfig& cfg);

/// Adaptive variant: productive steps use h = eps/||grad f||^2 and the run
/// stops at the first N with sum_{k in I} 1/||grad f(x^k)||^2 + |J| >=
/// 2*theta0^2/eps^2; returns the h-weighted average of productive iterates.
MdReport run_md2(const NumProblem& p, const MdConfig& cfg);

/// <grad f(y)/||grad f(y)||, y - x_ref>, and 0 when the gradient vanishes.
/// Diagnostic: upper-bounds (f(y) - f(x_ref))/||grad f(y)|| by convexity.
double directional_gap(const NumProblem& p, std::span<const double> y,
                       std::span<const double> x_ref);

}  // namespace num
