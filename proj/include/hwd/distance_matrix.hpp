#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hwd/matgauss.hpp"

namespace hwd {

/// Symmetric matrix of pairwise distances (not squared) with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  /// Validates: square, finite, nonnegative, exactly symmetric, zero diagonal.
  explicit DistanceMatrix(Matrix entries);

  Index size() const noexcept { return d_.rows(); }
  double operator()(Index i, Index j) const { return d_(i, j); }
  double squared(Index i, Index j) const { return d_(i, j) * d_(i, j); }
  const Matrix& entries() const noexcept { return d_; }

 private:
  Matrix d_;
};

/// Evaluates dist_sq(i, j) for i < j (rows spread over `threads`), stores
/// sqrt(max(0, .)) and mirrors it.
DistanceMatrix pairwise_distances(std::size_t n, const std::function<double(std::size_t, std::size_t)>& dist_sq,
                                  unsigned threads = 1);

}  // namespace hwd
