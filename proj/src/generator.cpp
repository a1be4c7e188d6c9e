#include "num/generator.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace num {

void InstanceSpec::validate() const {
  if (n < 1) throw std::invalid_argument("instance spec: n must be >= 1");
  if (m < 1) throw std::invalid_argument("instance spec: m must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("instance spec: p must lie in (0,1)");
  if (!(b_min > 0.0)) throw std::invalid_argument("instance spec: b_min must be > 0");
  if (!(b_min <= b_max)) throw std::invalid_argument("instance spec: b_min must be <= b_max");
  utility.validate(static_cast<std::size_t>(n));
}

namespace {

// Top-53-bit mapping keeps the stream identical across standard libraries
// (uniform_real_distribution is not pinned by the standard).
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

NumProblem generate_instance(const InstanceSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n);
  const auto m = static_cast<std::size_t>(spec.m);
  std::mt19937_64 rng(spec.seed);

  std::vector<std::vector<int>> rows(m);
  std::vector<int> col_count(n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (u01(rng) < spec.p) {
        rows[j].push_back(static_cast<int>(k));
        ++col_count[k];
      }
    }
  }

  int redraws = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (col_count[k] == 0) {
      if (++redraws > 1000)
        throw GenerationError("could not produce a routing matrix without zero columns in "
                              "1000 column redraws (p = " +
                              std::to_string(spec.p) + ")");
      for (std::size_t j = 0; j < m; ++j) {
        if (u01(rng) < spec.p) {
          auto& row = rows[j];
          row.insert(std::lower_bound(row.begin(), row.end(), static_cast<int>(k)),
                     static_cast<int>(k));
          ++col_count[k];
        }
      }
    }
  }

  Vec b(m);
  for (std::size_t j = 0; j < m; ++j)
    b[j] = spec.b_min + (spec.b_max - spec.b_min) * u01(rng);

  return NumProblem(RoutingMatrix(n, std::move(rows)), std::move(b), spec.utility);
}

}  // namespace num
