#include "num/ellipsoid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace num {

EllipsoidState EllipsoidState::initial(std::size_t m, double radius, Vec lambda0) {
  if (m == 0) throw std::invalid_argument("ellipsoid needs m >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("ellipsoid needs radius > 0");
  if (lambda0.size() != m) throw std::invalid_argument("lambda0 has wrong dimension");
  EllipsoidState s;
  s.m = m;
  s.shape.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) s.shape[i * m + i] = 2.0 * radius;
  s.lambda = std::move(lambda0);
  return s;
}

void em_step_inplace(EllipsoidState& state, std::span<const double> g,
                     EmDirection direction) {
  const std::size_t m = state.m;
  if (g.size() != m) throw std::invalid_argument("cut direction has wrong dimension");
  Vec& B = state.shape;
  Vec& lambda = state.lambda;

  if (m == 1) {
    // Interval halving: the rank-one term cancels the singular scaling.
    if (g[0] == 0.0) throw std::invalid_argument("em_step requires g != 0");
    double p = B[0] * g[0] > 0.0 ? 1.0 : -1.0;
    if (direction == EmDirection::Paper) p = (B[0] * (B[0] * g[0])) > 0.0 ? 1.0 : -1.0;
    double w = B[0] * p;
    lambda[0] -= w / 2.0;
    B[0] *= 0.5;
    if (!(std::fabs(B[0]) > 0.0) || !std::isfinite(B[0]))
      throw SingularShapeError("ellipsoid shape factor collapsed to zero");
    ++state.t;
    return;
  }

  Vec q(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    const double* row = &B[r * m];
    for (std::size_t i = 0; i < m; ++i) q[i] += gr * row[i];
  }
  if (direction == EmDirection::Paper) {
    // alternate normalization: B^T applied a second time before normalizing
    Vec q2(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double qr = q[r];
      if (qr == 0.0) continue;
      const double* row = &B[r * m];
      for (std::size_t i = 0; i < m; ++i) q2[i] += qr * row[i];
    }
    q = std::move(q2);
  }
  double qn2 = 0.0;
  for (double v : q) qn2 += v * v;
  double qn = std::sqrt(qn2);
  if (!(qn > 0.0) || !std::isfinite(qn))
    throw SingularShapeError(
        "ellipsoid shape factor lost rank (B^T g vanished); retry with a larger radius");
  const double inv_qn = 1.0 / qn;

  const double md = static_cast<double>(m);
  const double c1 = md / std::sqrt(md * md - 1.0);
  const double c2 = md / (md + 1.0) - c1;
  for (std::size_t r = 0; r < m; ++r) {
    double* row = &B[r * m];
    double w = 0.0;
    for (std::size_t i = 0; i < m; ++i) w += row[i] * q[i];
    w *= inv_qn;  // (B p)_r
    lambda[r] -= w / (md + 1.0);
    const double cw = c2 * w;
    for (std::size_t i = 0; i < m; ++i) row[i] = c1 * row[i] + cw * (q[i] * inv_qn);
  }
  ++state.t;
}

EllipsoidState em_step(EllipsoidState state, std::span<const double> g,
                       EmDirection direction) {
  em_step_inplace(state, g, direction);
  return state;
}

double rate_cap(const NumProblem& p) { return 10.0 * p.max_capacity(); }

namespace {

struct ResponseClamps {
  bool price_floor = false;
  bool rate_cap = false;
};

double response(const UtilitySpec& u, std::size_t k, double price, double price_floor,
                double cap, ResponseClamps* clamps) {
  double q = price;
  if (q < price_floor) {
    q = price_floor;
    if (clamps) clamps->price_floor = true;
  }
  double x = u.inverse_slope(k, q);
  if (x > cap) {
    x = cap;
    if (clamps) clamps->rate_cap = true;
  }
  return x;
}

// Prices, best responses, dual value and subgradient in one pass.
struct DualEval {
  Vec x;
  Vec grad;  // b - C x
  double phi = 0.0;
};

DualEval dual_eval(const NumProblem& p, std::span<const double> lambda,
                   double price_floor, ResponseClamps* clamps) {
  const std::size_t n = p.users();
  const std::size_t m = p.links();
  const auto& routing = p.routing();
  Vec q(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double lj = lambda[j];
    if (lj == 0.0) continue;
    for (int k : routing.row(j)) q[static_cast<std::size_t>(k)] += lj;
  }
  DualEval ev;
  ev.x.resize(n);
  const double cap = rate_cap(p);
  const auto& u = p.utility();
  double phi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double xk = response(u, k, q[k], price_floor, cap, clamps);
    ev.x[k] = xk;
    phi += u.value(k, xk) - q[k] * xk;
  }
  ev.grad.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    phi += lambda[j] * p.capacities()[j];
    ev.grad[j] = p.capacities()[j] - routing.load(j, ev.x);
  }
  ev.phi = phi;
  return ev;
}

}  // namespace

double best_response(const NumProblem& p, std::size_t k, double price,
                     double price_floor) {
  if (k >= p.users()) throw std::out_of_range("best_response: user index out of range");
  if (price < 0.0) throw std::invalid_argument("best_response requires price >= 0");
  return response(p.utility(), k, price, price_floor, rate_cap(p), nullptr);
}

double dual_value(const NumProblem& p, std::span<const double> lambda,
                  double price_floor) {
  return dual_eval(p, lambda, price_floor, nullptr).phi;
}

Vec dual_subgradient(const NumProblem& p, std::span<const double> lambda,
                     double price_floor) {
  return dual_eval(p, lambda, price_floor, nullptr).grad;
}

double duality_gap(const NumProblem& p, std::span<const double> x,
                   std::span<const double> lambda) {
  return dual_value(p, lambda) - eval_utility(p, x);
}

std::size_t Certificate::support() const {
  std::size_t count = 0;
  for (double w : xi)
    if (w > 0.0) ++count;
  return count;
}

Certificate build_certificate(const std::vector<EmStepRecord>& history) {
  if (history.empty()) throw std::invalid_argument("build_certificate: empty history");
  const std::size_t N = history.size();
  double sum = 0.0;
  std::size_t count = 0;
  double best_avg = std::numeric_limits<double>::infinity();
  std::size_t best_begin = N;
  std::size_t best_count = 0;
  for (std::size_t s = N; s-- > 0;) {
    if (history[s].productive) {
      sum += history[s].dual_value;
      ++count;
      double avg = sum / static_cast<double>(count);
      if (avg <= best_avg) {  // ties keep the longer suffix
        best_avg = avg;
        best_begin = s;
        best_count = count;
      }
    }
  }
  if (count == 0)
    throw NoProductiveStepsError(
        "no productive ellipsoid steps recorded; the radius R is likely too small");

  Certificate cert;
  cert.xi.assign(N, 0.0);
  cert.productive.resize(N);
  cert.window_begin = best_begin;
  const double w = 1.0 / static_cast<double>(best_count);
  for (std::size_t t = 0; t < N; ++t) {
    cert.productive[t] = history[t].productive ? 1 : 0;
    if (history[t].productive && t >= best_begin) cert.xi[t] = w;
  }
  return cert;
}

namespace {

long long em_budget(std::size_t m, double M, double R, double eps) {
  double L = std::ceil(std::log(32.0 * 4.0 * M * R / eps));
  if (!(L > 1.0)) L = 1.0;
  double budget = 2.0 * static_cast<double>(m) * (static_cast<double>(m) + 1.0) * L;
  return static_cast<long long>(std::min(budget, 8.9e18));
}

// Deterministic iteration shared by the recording pass and the recovery
// replay; Sink sees each step before the cut is applied.
template <typename Sink>
long long em_iterate(const NumProblem& p, const Vec& lambda0, double R,
                     double price_floor, long long steps, EmDirection direction,
                     Sink&& sink) {
  const std::size_t m = p.links();
  EllipsoidState state = EllipsoidState::initial(m, R, lambda0);
  Vec separator(m);
  for (long long t = 0; t < steps; ++t) {
    const Vec& lambda = state.lambda;
    double min_coord = std::numeric_limits<double>::infinity();
    std::size_t neg_j = m;
    double norm2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      norm2 += lambda[j] * lambda[j];
      if (lambda[j] < min_coord) min_coord = lambda[j];
      if (lambda[j] < 0.0 && neg_j == m) neg_j = j;
    }
    const double norm = std::sqrt(norm2);
    const bool inside = min_coord >= 0.0 && norm <= 2.0 * R;
    if (inside) {
      ResponseClamps clamps;
      DualEval ev = dual_eval(p, lambda, price_floor, &clamps);
      double gn2 = 0.0;
      for (double v : ev.grad) gn2 += v * v;
      sink.productive(t, lambda, ev, clamps);
      if (gn2 == 0.0) return t + 1;  // exact dual stationarity; nothing left to cut
      em_step_inplace(state, ev.grad, direction);
    } else {
      sink.nonproductive(t);
      std::fill(separator.begin(), separator.end(), 0.0);
      if (neg_j < m) {
        separator[neg_j] = -1.0;
      } else {
        for (std::size_t j = 0; j < m; ++j) separator[j] = lambda[j] / norm;
      }
      em_step_inplace(state, separator, direction);
    }
  }
  return steps;
}

struct RecordSink {
  std::vector<EmStepRecord>& history;
  double best_phi = std::numeric_limits<double>::infinity();
  Vec best_lambda;
  bool price_floor_engaged = false;
  bool rate_cap_engaged = false;

  void productive(long long, const Vec& lambda, const DualEval& ev,
                  const ResponseClamps& clamps) {
    history.push_back({true, ev.phi});
    price_floor_engaged |= clamps.price_floor;
    rate_cap_engaged |= clamps.rate_cap;
    if (ev.phi < best_phi) {
      best_phi = ev.phi;
      best_lambda = lambda;
    }
  }
  void nonproductive(long long) {
    history.push_back({false, std::numeric_limits<double>::quiet_NaN()});
  }
};

struct RecoverSink {
  const Certificate& cert;
  Vec sum;
  long long used = 0;

  void productive(long long t, const Vec&, const DualEval& ev, const ResponseClamps&) {
    const auto idx = static_cast<std::size_t>(t);
    if (idx < cert.xi.size() && cert.xi[idx] > 0.0) {
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += ev.x[k];
      ++used;
    }
  }
  void nonproductive(long long) {}
};

}  // namespace

EmReport em_run(const NumProblem& p, const EmConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t m = p.links();
  const std::size_t n = p.users();

  if (!(cfg.eps > 0.0)) throw std::invalid_argument("em_run requires eps > 0");
  if (!(cfg.price_floor > 0.0)) throw std::invalid_argument("price_floor must be > 0");
  const double R = cfg.radius.value_or(10.0 * static_cast<double>(m));
  if (!(R > 0.0)) throw std::invalid_argument("em_run requires radius > 0");
  double bnorm2 = 0.0;
  for (double bj : p.capacities()) bnorm2 += bj * bj;
  const double M = cfg.grad_bound.value_or(
      std::sqrt(bnorm2) +
      p.constraint_lipschitz() * std::sqrt(static_cast<double>(n)) * rate_cap(p));
  if (!(M > 0.0)) throw std::invalid_argument("em_run requires grad_bound > 0");
  Vec lambda0 = cfg.lambda0.value_or(Vec(m, 1e-20));
  if (lambda0.size() != m) throw std::invalid_argument("lambda0 has wrong dimension");

  EmReport report;
  report.budget = em_budget(m, M, R, cfg.eps);
  report.radius_used = R;
  report.grad_bound_used = M;

  long long steps = report.budget;
  bool capped = false;
  if (cfg.max_iters && *cfg.max_iters < steps) {
    steps = *cfg.max_iters;
    capped = true;
  }
  if (steps <= 0) throw std::invalid_argument("max_iters must be > 0");

  report.history.reserve(static_cast<std::size_t>(steps));
  RecordSink rec{report.history, std::numeric_limits<double>::infinity(), {}, false, false};
  report.iterations = em_iterate(p, lambda0, R, cfg.price_floor, steps, cfg.direction, rec);
  report.price_floor_engaged = rec.price_floor_engaged;
  report.rate_cap_engaged = rec.rate_cap_engaged;
  report.stop_reason = capped ? StopReason::CapHit : StopReason::CriterionMet;

  bool any_productive = false;
  for (const auto& h : report.history)
    if (h.productive) {
      any_productive = true;
      break;
    }
  if (!any_productive) {
    report.stop_reason = StopReason::NoProductiveSteps;
    report.dual_value = std::numeric_limits<double>::quiet_NaN();
    report.primal_utility = std::numeric_limits<double>::quiet_NaN();
    report.violation_norm = std::numeric_limits<double>::quiet_NaN();
    report.max_violation = std::numeric_limits<double>::quiet_NaN();
    report.gap = std::numeric_limits<double>::quiet_NaN();
    report.wall_time_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t_start)
                              .count();
    return report;
  }

  report.certificate = build_certificate(report.history);
  report.certificate_support = static_cast<long long>(report.certificate.support());
  report.lambda = rec.best_lambda;
  report.dual_value = rec.best_phi;

  RecoverSink recover{report.certificate, Vec(n, 0.0)};
  em_iterate(p, lambda0, R, cfg.price_floor, report.iterations, cfg.direction, recover);
  Vec xhat(n);
  for (std::size_t k = 0; k < n; ++k)
    xhat[k] = recover.sum[k] / static_cast<double>(recover.used);
  report.primal_utility = eval_utility(p, xhat);
  double vn2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double excess = p.routing().load(j, xhat) - p.capacities()[j];
    if (excess > 0.0) vn2 += excess * excess;
  }
  report.violation_norm = std::sqrt(vn2);
  report.max_violation = max_violation(p, xhat);
  report.gap = report.dual_value - report.primal_utility;
  report.recovered_x = std::move(xhat);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

}  // namespace num
