#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "num/mirror_descent.hpp"  // StopReason
#include "num/problem.hpp"

namespace num {

enum class EmDirection { Standard, Paper };

/// Raised when the ellipsoid shape factor collapses numerically; usually means
/// the radius R was chosen far too small for the instance.
struct SingularShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoProductiveStepsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmConfig {
  double eps = 0.0;
  /// Dual radius bound ||lambda*|| <= R. Default: 10*m (documented heuristic).
  std::optional<double> radius;
  /// Subgradient bound M used only in the iteration budget.
  /// Default: ||b||_2 + M_g*sqrt(n)*x_max, valid under the best-response clamp.
  std::optional<double> grad_bound;
  std::optional<Vec> lambda0;  // default: all components 1e-20
  double price_floor = 1e-12;
  std::optional<long long> max_iters;
  EmDirection direction = EmDirection::Standard;
};

/// Center, shape factor (row-major m x m) and step index of the ellipsoid.
struct EllipsoidState {
  std::size_t m = 0;
  Vec shape;  // B, full rank throughout
  Vec lambda;
  long long t = 0;

  static EllipsoidState initial(std::size_t m, double radius, Vec lambda0);
};

/// One cut: direction g (nonzero), textbook normalization by default.
/// B_{t+1} = m/sqrt(m^2-1) * B + (m/(m+1) - m/sqrt(m^2-1)) * (Bp) p^T and
/// lambda_{t+1} = lambda - Bp/(m+1), with p = B^T g normalized. m = 1 reduces
/// to interval halving. Shrinks |det B| by (m/sqrt(m^2-1))^(m-1) * m/(m+1).
void em_step_inplace(EllipsoidState& state, std::span<const double> g,
                     EmDirection direction = EmDirection::Standard);
EllipsoidState em_step(EllipsoidState state, std::span<const double> g,
                       EmDirection direction = EmDirection::Standard);

/// Largest rate a best response may return: 10 * max_j b_j. Every feasible
/// rate is below it, so clamping there leaves the optimum untouched.
double rate_cap(const NumProblem& p);

/// argmax_x {u_k(x) - price * x} with the price floored at price_floor and the
/// result capped at rate_cap(p). Closed forms for all three utility families.
double best_response(const NumProblem& p, std::size_t k, double price,
                     double price_floor = 1e-12);

/// User prices q_k = <lambda, C_k> (column gathers), then the dual objective
/// phi(lambda) = <lambda, b> + sum_k (u_k(x_k) - q_k x_k) at x = best responses.
/// With clamped responses this is the dual of the box-augmented primal
/// (x <= rate_cap), whose optimum equals the original one, so phi(lambda) >= U*
/// for every lambda >= 0.
double dual_value(const NumProblem& p, std::span<const double> lambda,
                  double price_floor = 1e-12);

/// Danskin subgradient: component j is b_j - <C_j, x(lambda)>.
Vec dual_subgradient(const NumProblem& p, std::span<const double> lambda,
                     double price_floor = 1e-12);

/// phi(lambda) - U(x); nonnegative whenever x is capacity-feasible. No sign
/// guarantee for infeasible x.
double duality_gap(const NumProblem& p, std::span<const double> x,
                   std::span<const double> lambda);

struct EmStepRecord {
  bool productive = false;
  double dual_value = 0.0;  // NaN on non-productive steps
};

/// Nonnegative weights over recorded steps, summing to one, supported on
/// productive steps only.
struct Certificate {
  Vec xi;
  std::vector<std::uint8_t> productive;
  std::size_t window_begin = 0;
  std::size_t support() const;
};

/// Uniform weights over the productive steps of the best window: the suffix of
/// the history with the smallest average productive dual value (ties prefer
/// the longer suffix). Throws NoProductiveStepsError on an all-unproductive
/// history.
Certificate build_certificate(const std::vector<EmStepRecord>& history);

struct EmReport {
  Vec lambda;               // productive iterate with the smallest dual value
  double dual_value = 0.0;  // phi at that iterate
  Vec recovered_x;          // certificate-weighted mix of best responses
  double primal_utility = 0.0;
  double violation_norm = 0.0;  // ||[C x - b]_+||_2
  double max_violation = 0.0;   // worst single-row excess
  double gap = 0.0;             // dual_value - primal_utility
  long long iterations = 0;
  double wall_time_ms = 0.0;
  StopReason stop_reason = StopReason::CriterionMet;

  long long budget = 0;  // 2m(m+1)*ceil(ln(32*4*M*R/eps))
  double radius_used = 0.0;
  double grad_bound_used = 0.0;
  long long certificate_support = 0;
  bool price_floor_engaged = false;
  bool rate_cap_engaged = false;
  Certificate certificate;
  std::vector<EmStepRecord> history;
};

/// Runs the constrained cutting loop for the full budget (or cfg.max_iters):
/// centers inside Lambda_2R = {lambda >= 0, ||lambda|| <= 2R} take a
/// subgradient cut and count as productive; centers outside take a separation
/// cut (-e_j for the first negative coordinate, else lambda/||lambda||). The
/// primal point is recovered by replaying the deterministic iteration over the
/// certificate window.
EmReport em_run(const NumProblem& p, const EmConfig& cfg);

}  // namespace num
