#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace num {

/// Sparse boolean routing matrix.
///
/// Row j holds the sorted user indices crossing link j, so <C_j, x> is a gather
/// over that row and ||C_j||_2 = sqrt(row size). Every user must appear in at
/// least one row. Immutable after construction.
class RoutingMatrix {
 public:
  RoutingMatrix() = default;
  /// Validates index ranges, sortedness, and user coverage; throws
  /// std::invalid_argument naming the first violated invariant.
  RoutingMatrix(std::size_t n_users, std::vector<std::vector<int>> rows);

  std::size_t links() const { return rows_.size(); }
  std::size_t users() const { return n_; }
  const std::vector<int>& row(std::size_t j) const { return rows_[j]; }
  const std::vector<std::vector<int>>& rows() const { return rows_; }

  double row_norm(std::size_t j) const { return row_norms_[j]; }
  /// M_g: the largest row norm (constraint Lipschitz bound).
  double max_row_norm() const { return max_row_norm_; }
  std::size_t max_row_size() const { return max_row_size_; }

  /// <C_j, x>
  double load(std::size_t j, std::span<const double> x) const;
  /// All link loads in one pass; out must have links() entries.
  void loads(std::span<const double> x, std::span<double> out) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<int>> rows_;
  std::vector<double> row_norms_;
  double max_row_norm_ = 0.0;
  std::size_t max_row_size_ = 0;
};

}  // namespace num
