#include "num/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace num {

namespace {

constexpr std::size_t kMaxUsers = 6;
constexpr std::size_t kMaxLinks = 4;

// Dense Gaussian elimination with partial pivoting; s <= 4 here.
bool solve_dense(std::vector<double>& a, std::vector<double>& rhs, std::size_t s) {
  for (std::size_t col = 0; col < s; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < s; ++r)
      if (std::fabs(a[r * s + col]) > std::fabs(a[pivot * s + col])) pivot = r;
    if (std::fabs(a[pivot * s + col]) < 1e-14) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < s; ++c) std::swap(a[pivot * s + c], a[col * s + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = col + 1; r < s; ++r) {
      double f = a[r * s + col] / a[col * s + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < s; ++c) a[r * s + c] -= f * a[col * s + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t r = s; r-- > 0;) {
    double v = rhs[r];
    for (std::size_t c = r + 1; c < s; ++c) v -= a[r * s + c] * rhs[c];
    rhs[r] = v / a[r * s + r];
  }
  return true;
}

struct TightSystem {
  const NumProblem& p;
  std::vector<std::size_t> active;  // row indices in A
  std::vector<std::vector<int>> user_links;  // per user: positions in `active` covering it

  // q_k = sum of lambda over active links covering user k
  void prices(const Vec& lam, Vec& q) const {
    const std::size_t n = p.users();
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (int pos : user_links[k]) s += lam[static_cast<std::size_t>(pos)];
      q[k] = s;
    }
  }

  void rates(const Vec& q, Vec& x) const {
    const auto& u = p.utility();
    for (std::size_t k = 0; k < q.size(); ++k) x[k] = u.inverse_slope(k, q[k]);
  }

  void residual(const Vec& x, Vec& f) const {
    for (std::size_t a = 0; a < active.size(); ++a)
      f[a] = p.routing().load(active[a], x) - p.capacities()[active[a]];
  }

  double residual_norm(const Vec& lam, Vec& q, Vec& x, Vec& f) const {
    prices(lam, q);
    rates(q, x);
    residual(x, f);
    double worst = 0.0;
    for (double v : f) worst = std::max(worst, std::fabs(v));
    return worst;
  }
};

bool newton_solve(const TightSystem& sys, Vec& lam, double tol) {
  const std::size_t s = sys.active.size();
  const std::size_t n = sys.p.users();
  Vec q(n), x(n), f(s), jac(s * s), step(s), q_try(n), x_try(n), f_try(s);
  Vec trial(s);
  double worst = sys.residual_norm(lam, q, x, f);
  for (int it = 0; it < 200 && worst > tol; ++it) {
    const auto& u = sys.p.utility();
    std::fill(jac.begin(), jac.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& links = sys.user_links[k];
      if (links.empty()) continue;
      double d = u.inverse_slope_derivative(k, q[k]);
      for (int a : links)
        for (int b : links)
          jac[static_cast<std::size_t>(a) * s + static_cast<std::size_t>(b)] += d;
    }
    step = f;
    for (double& v : step) v = -v;
    if (!solve_dense(jac, step, s)) return false;

    double alpha = 1.0;
    bool moved = false;
    for (int halvings = 0; halvings < 60; ++halvings, alpha *= 0.5) {
      bool positive = true;
      for (std::size_t a = 0; a < s; ++a) {
        trial[a] = lam[a] + alpha * step[a];
        if (!(trial[a] > 0.0)) {
          positive = false;
          break;
        }
      }
      if (!positive) continue;
      double worst_try = sys.residual_norm(trial, q_try, x_try, f_try);
      if (worst_try < worst * (1.0 - 0.25 * alpha) || worst_try < tol) {
        lam = trial;
        worst = worst_try;
        moved = true;
        break;
      }
    }
    if (!moved) return false;
    sys.prices(lam, q);
    sys.rates(q, x);
  }
  return worst <= tol;
}

// Per-row bisection sweeps: each F_a is strictly decreasing in lambda_a.
bool sweep_solve(const TightSystem& sys, Vec& lam, double tol) {
  const std::size_t s = sys.active.size();
  const std::size_t n = sys.p.users();
  Vec q(n), x(n), f(s);
  for (int sweep = 0; sweep < 500; ++sweep) {
    for (std::size_t a = 0; a < s; ++a) {
      double lo = 0.0, hi = std::max(1.0, 2.0 * lam[a]);
      auto eval = [&](double v) {
        lam[a] = v;
        sys.prices(lam, q);
        // Users priced at zero stay unbounded; treat as +inf load.
        for (std::size_t k = 0; k < n; ++k)
          if (!(q[k] > 0.0)) return std::numeric_limits<double>::infinity();
        sys.rates(q, x);
        return sys.p.routing().load(sys.active[a], x) - sys.p.capacities()[sys.active[a]];
      };
      for (int grow = 0; grow < 200 && eval(hi) > 0.0; ++grow) hi *= 2.0;
      if (eval(lo) <= 0.0) {
        lam[a] = 0.0;  // row slack even at zero price
        continue;
      }
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (eval(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      lam[a] = hi;
    }
    if (sys.residual_norm(lam, q, x, f) <= tol) return true;
    // Rows parked at zero price may legitimately carry residual < 0.
    bool ok = true;
    for (std::size_t a = 0; a < s; ++a)
      if (!(std::fabs(f[a]) <= tol || (lam[a] == 0.0 && f[a] <= tol))) ok = false;
    if (ok && sweep > 2) return true;
  }
  Vec ff(s);
  double worst = sys.residual_norm(lam, q, x, ff);
  for (std::size_t a = 0; a < s; ++a)
    if (!(std::fabs(ff[a]) <= tol || (lam[a] == 0.0 && ff[a] <= tol))) return false;
  (void)worst;
  return true;
}

}  // namespace

OracleSolution reference_solution(const NumProblem& p) {
  const std::size_t n = p.users();
  const std::size_t m = p.links();
  if (n > kMaxUsers || m > kMaxLinks)
    throw OracleGuardError("reference_solution is guarded to n <= " +
                           std::to_string(kMaxUsers) + ", m <= " + std::to_string(kMaxLinks) +
                           " (got n = " + std::to_string(n) + ", m = " + std::to_string(m) +
                           ")");

  const double tol = 1e-12 * std::max(1.0, p.max_capacity());
  const double feas_tol = 1e-9;

  std::vector<unsigned> user_mask(n, 0);
  for (std::size_t j = 0; j < m; ++j)
    for (int k : p.routing().row(j)) user_mask[static_cast<std::size_t>(k)] |= 1u << j;

  bool found = false;
  OracleSolution best;
  best.utility = -std::numeric_limits<double>::infinity();

  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    bool covers = true;
    for (std::size_t k = 0; k < n; ++k)
      if ((user_mask[k] & mask) == 0) {
        covers = false;
        break;
      }
    if (!covers) continue;

    TightSystem sys{p, {}, {}};
    bool empty_row = false;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (1u << j)) {
        if (p.routing().row(j).empty()) empty_row = true;
        sys.active.push_back(j);
      }
    if (empty_row) continue;
    sys.user_links.assign(n, {});
    for (std::size_t a = 0; a < sys.active.size(); ++a)
      for (int k : p.routing().row(sys.active[a]))
        sys.user_links[static_cast<std::size_t>(k)].push_back(static_cast<int>(a));

    Vec lam(sys.active.size());
    for (std::size_t a = 0; a < sys.active.size(); ++a)
      lam[a] = static_cast<double>(p.routing().row(sys.active[a]).size()) /
               p.capacities()[sys.active[a]];

    bool solved = newton_solve(sys, lam, tol);
    if (!solved) {
      for (std::size_t a = 0; a < sys.active.size(); ++a)
        lam[a] = static_cast<double>(p.routing().row(sys.active[a]).size()) /
                 p.capacities()[sys.active[a]];
      solved = sweep_solve(sys, lam, 1e-11 * std::max(1.0, p.max_capacity()));
    }
    if (!solved) continue;

    Vec q(n), x(n);
    sys.prices(lam, q);
    bool priced = true;
    for (std::size_t k = 0; k < n; ++k)
      if (!(q[k] > 0.0)) priced = false;
    if (!priced) continue;
    sys.rates(q, x);

    bool valid = true;
    for (double v : lam)
      if (!(v >= 0.0) || !std::isfinite(v)) valid = false;
    if (valid && max_violation(p, x) > feas_tol) valid = false;
    if (!valid) continue;

    double utility = eval_utility(p, x);
    if (utility > best.utility) {
      best.utility = utility;
      best.x = x;
      best.lambda.assign(m, 0.0);
      for (std::size_t a = 0; a < sys.active.size(); ++a) best.lambda[sys.active[a]] = lam[a];
      found = true;
    }
  }

  if (!found)
    throw std::runtime_error(
        "reference_solution: no KKT-consistent active set found; the instance is likely "
        "malformed");
  return best;
}

}  // namespace num
