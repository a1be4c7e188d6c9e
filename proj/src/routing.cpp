#include "num/routing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace num {

RoutingMatrix::RoutingMatrix(std::size_t n_users, std::vector<std::vector<int>> rows)
    : n_(n_users), rows_(std::move(rows)) {
  if (n_ == 0) throw std::invalid_argument("routing matrix needs at least one user");
  std::vector<char> covered(n_, 0);
  row_norms_.resize(rows_.size());
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const auto& row = rows_[j];
    int prev = -1;
    for (int k : row) {
      if (k < 0 || static_cast<std::size_t>(k) >= n_)
        throw std::invalid_argument("row " + std::to_string(j) + ": user index " +
                                    std::to_string(k) + " out of range [0, " +
                                    std::to_string(n_) + ")");
      if (k <= prev)
        throw std::invalid_argument("row " + std::to_string(j) +
                                    ": user indices must be strictly increasing");
      prev = k;
      covered[static_cast<std::size_t>(k)] = 1;
    }
    row_norms_[j] = std::sqrt(static_cast<double>(row.size()));
    if (row_norms_[j] > max_row_norm_) max_row_norm_ = row_norms_[j];
    if (row.size() > max_row_size_) max_row_size_ = row.size();
  }
  for (std::size_t k = 0; k < n_; ++k)
    if (!covered[k])
      throw std::invalid_argument("user " + std::to_string(k) +
                                  " participates in no link (zero column)");
}

double RoutingMatrix::load(std::size_t j, std::span<const double> x) const {
  double s = 0.0;
  for (int k : rows_[j]) s += x[static_cast<std::size_t>(k)];
  return s;
}

void RoutingMatrix::loads(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < rows_.size(); ++j) out[j] = load(j, x);
}

}  // namespace num
