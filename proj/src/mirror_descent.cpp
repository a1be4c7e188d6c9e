#include "num/mirror_descent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace num {

const char* to_string(MdMode mode) {
  return mode == MdMode::LogShift ? "log-shift" : "standard";
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::CriterionMet:
      return "criterion_met";
    case StopReason::CapHit:
      return "cap_hit";
    case StopReason::NoProductiveSteps:
      return "no_productive_steps";
  }
  return "?";
}

Vec project(Vec x, double floor) {
  for (double& v : x)
    if (v < floor) v = floor;
  return x;
}

double directional_gap(const NumProblem& p, std::span<const double> y,
                       std::span<const double> x_ref) {
  Vec g = grad_objective(p, y);
  double norm2 = 0.0;
  for (double v : g) norm2 += v * v;
  if (norm2 == 0.0) return 0.0;
  double inv = 1.0 / std::sqrt(norm2);
  double dot = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) dot += g[k] * (y[k] - x_ref[k]);
  return dot * inv;
}

namespace {

constexpr double kCountClamp = 8.9e18;  // keep iteration counts inside long long

// Ceil with a snap to the nearest integer, so stop counts like 2*theta^2/eps^2
// are not bumped by one ulp of rounding in the quotient.
long long ceil_count(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= kCountClamp) return static_cast<long long>(kCountClamp);
  double r = std::nearbyint(v);
  if (std::fabs(v - r) <= 1e-9 * std::max(1.0, std::fabs(v)))
    return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(v));
}

long long scaled_cap(long long planned) {
  if (planned >= static_cast<long long>(kCountClamp) / 4) return static_cast<long long>(kCountClamp);
  return 4 * planned;
}

enum class Variant { FixedBudget, Adaptive };

MdReport run_core(const NumProblem& p, const MdConfig& cfg, Variant variant) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = p.users();
  const std::size_t m = p.links();
  const RoutingMatrix& routing = p.routing();

  if (!(cfg.eps > 0.0)) throw std::invalid_argument("mirror descent requires eps > 0");
  if (cfg.theta0 && !(*cfg.theta0 > 0.0))
    throw std::invalid_argument("mirror descent requires theta0 > 0");
  if (cfg.start && cfg.start->size() != n)
    throw std::invalid_argument("start point has wrong dimension");
  if (cfg.trace_every < 0) throw std::invalid_argument("trace_every must be >= 0");

  const bool log_shift = cfg.mode == MdMode::LogShift;
  const double eps = cfg.eps;
  const double floor = log_shift ? eps * static_cast<double>(n) : 0.0;
  // Fixed-budget runs in shifted mode scale the step coefficient to eps^2;
  // the productive test keeps the eps threshold in every configuration.
  const double step_coeff =
      (variant == Variant::FixedBudget && log_shift) ? eps * eps : eps;
  const double theta0 =
      cfg.theta0.value_or(std::sqrt(static_cast<double>(n) / 2.0) * p.max_capacity());

  MdReport report;
  report.eps = eps;
  report.theta0_used = theta0;
  report.mode = cfg.mode;
  report.unproductive_by_link.assign(m, 0);

  if (log_shift) {
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j)
      if (!routing.row(j).empty())
        min_ratio = std::min(min_ratio, p.capacities()[j] /
                                            static_cast<double>(routing.row(j).size()));
    if (!(floor < min_ratio))
      report.warnings.push_back(
          "shifted domain is capacity-infeasible: eps*n = " + std::to_string(floor) +
          " >= min_j b_j/|row_j| = " + std::to_string(min_ratio) +
          "; no productive step can occur");
  }

  Vec x = cfg.start ? project(*cfg.start, floor) : Vec(n, floor);

  long long planned = 0;
  double threshold = 0.0;
  if (variant == Variant::FixedBudget) {
    planned = ceil_count(2.0 * theta0 * theta0 / (step_coeff * step_coeff));
    report.planned_iters = planned;
  } else {
    threshold = 2.0 * theta0 * theta0 / (eps * eps);
    report.criterion_threshold = threshold;
  }

  long long cap;
  if (cfg.max_iters_cap) {
    if (*cfg.max_iters_cap <= 0) throw std::invalid_argument("max_iters_cap must be > 0");
    cap = *cfg.max_iters_cap;
  } else if (variant == Variant::FixedBudget) {
    cap = scaled_cap(planned);
  } else if (log_shift) {
    // worst case via the shifted-domain Lipschitz constant 1/eps
    cap = scaled_cap(ceil_count(2.0 * theta0 * theta0 / (eps * eps * eps * eps)));
  } else {
    cap = std::numeric_limits<long long>::max();  // refined below from realized M_f
  }

  Vec loads(m);
  Vec grad(n);
  Vec best_x;
  double best_f = std::numeric_limits<double>::infinity();
  Vec weighted_sum(n, 0.0);
  double weight_total = 0.0;
  double stop_sum = 0.0;
  double max_prod_gn = 0.0;
  double max_prod_scaled = 0.0;

  long long iter = 0;
  StopReason reason = StopReason::CapHit;

  while (true) {
    if (variant == Variant::FixedBudget && iter >= planned) {
      reason = StopReason::CriterionMet;
      break;
    }
    if (variant == Variant::Adaptive && stop_sum >= threshold) {
      reason = StopReason::CriterionMet;
      break;
    }
    long long effective_cap = cap;
    if (variant == Variant::Adaptive && !cfg.max_iters_cap && !log_shift) {
      double mf2 = std::max(1.0, max_prod_gn * max_prod_gn);
      effective_cap = scaled_cap(ceil_count(2.0 * theta0 * theta0 * mf2 / (eps * eps)));
    }
    if (iter >= effective_cap) {
      reason = StopReason::CapHit;
      break;
    }

    routing.loads(x, loads);
    long long violated = -1;
    if (cfg.pick == ConstraintPick::SmallestIndex) {
      for (std::size_t j = 0; j < m; ++j) {
        if (loads[j] - p.capacities()[j] > eps * routing.row_norm(j)) {
          violated = static_cast<long long>(j);
          break;
        }
      }
    } else {
      double worst = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double g = loads[j] - p.capacities()[j];
        if (g > eps * routing.row_norm(j) && g > worst) {
          worst = g;
          violated = static_cast<long long>(j);
        }
      }
    }

    const bool tracing = cfg.trace_every > 0 && iter % cfg.trace_every == 0;
    StepTrace entry;
    if (tracing) {
      entry.iter = iter;
      entry.x = x;
    }

    if (violated < 0) {
      grad_objective_into(p, x, grad);
      double norm2 = 0.0;
      for (double v : grad) norm2 += v * v;
      double gn = std::sqrt(norm2);
      if (gn > max_prod_gn) max_prod_gn = gn;
      for (std::size_t j = 0; j < m; ++j) {
        double rn = routing.row_norm(j);
        if (rn > 0.0) {
          double scaled = (loads[j] - p.capacities()[j]) / rn;
          if (scaled > max_prod_scaled) max_prod_scaled = scaled;
        }
      }

      double h;
      if (variant == Variant::FixedBudget) {
        double f_here = eval_objective(p, x);
        if (f_here < best_f) {
          best_f = f_here;
          best_x = x;
        }
        h = gn > 0.0 ? step_coeff / gn : 0.0;
        if (tracing) entry.objective = f_here;
      } else {
        double inv = norm2 > 0.0 ? 1.0 / norm2 : 0.0;
        h = eps * inv;
        stop_sum += inv;
        if (h > 0.0) {
          weight_total += h;
          for (std::size_t k = 0; k < n; ++k) weighted_sum[k] += h * x[k];
        }
        if (tracing) entry.objective = eval_objective(p, x);
      }
      if (tracing) {
        entry.productive = true;
        entry.step_size = h;
        entry.grad_norm = gn;
      }
      for (std::size_t k = 0; k < n; ++k) {
        double v = x[k] - h * grad[k];
        x[k] = v < floor ? floor : v;
      }
      ++report.productive_count;
    } else {
      const auto j = static_cast<std::size_t>(violated);
      double rn = routing.row_norm(j);
      double h = step_coeff / rn;
      for (int k : routing.row(j)) {
        double v = x[static_cast<std::size_t>(k)] - h;
        x[static_cast<std::size_t>(k)] = v < floor ? floor : v;
      }
      if (variant == Variant::Adaptive) stop_sum += 1.0;
      if (tracing) {
        entry.productive = false;
        entry.step_size = h;
        entry.grad_norm = rn;
        entry.row = violated;
      }
      ++report.unproductive_count;
      ++report.unproductive_by_link[j];
    }
    if (tracing) report.trace.push_back(std::move(entry));
    ++iter;
  }

  report.total_iters = iter;
  report.max_productive_grad_norm = max_prod_gn;
  report.max_productive_scaled_violation = max_prod_scaled;
  if (variant == Variant::Adaptive) report.criterion_sum = stop_sum;

  if (report.productive_count == 0) {
    reason = StopReason::NoProductiveSteps;
    report.solution = std::move(x);
    report.objective = std::numeric_limits<double>::quiet_NaN();
    report.utility = std::numeric_limits<double>::quiet_NaN();
  } else if (variant == Variant::FixedBudget) {
    report.solution = std::move(best_x);
    report.objective = best_f;
    report.utility = -best_f;
  } else {
    Vec avg(n);
    for (std::size_t k = 0; k < n; ++k) avg[k] = weighted_sum[k] / weight_total;
    report.objective = eval_objective(p, avg);
    report.utility = -report.objective;
    report.solution = std::move(avg);
  }
  report.stop_reason = reason;
  report.max_violation = max_violation(p, report.solution);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

}  // namespace

MdReport run_md1(const NumProblem& p, const MdConfig& cfg) {
  return run_core(p, cfg, Variant::FixedBudget);
}

MdReport run_md2(const NumProblem& p, const MdConfig& cfg) {
  return run_core(p, cfg, Variant::Adaptive);
}

}  // namespace num
