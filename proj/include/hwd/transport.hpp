#pragma once

// Exact discrete optimal transport between equal-size samples.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hwd/matgauss.hpp"

namespace hwd {

/// One empirical distribution: n observations (rows) in d dimensions.
struct Dataset {
  Matrix points;
  std::string id;

  Dataset() = default;
  /// Throws InsufficientData for an empty matrix and InvalidParam for NaN/Inf entries.
  explicit Dataset(Matrix pts, std::string label = {});

  Index size() const noexcept { return points.rows(); }
  Index dim() const noexcept { return points.cols(); }
};

struct Assignment {
  std::vector<std::size_t> perm;  // row i is matched to column perm[i]
  double total = 0.0;             // sum_i costs(i, perm[i])

  /// Mean cost per matched pair.
  double cost() const noexcept { return perm.empty() ? 0.0 : total / static_cast<double>(perm.size()); }
};

/// Minimum-cost perfect assignment of a square cost matrix (Kuhn-Munkres with
/// potentials, O(m^3)). Ties resolve deterministically.
Assignment hungarian(const Matrix& costs);

/// Matrix of squared Euclidean distances between the rows of a and b.
Matrix squared_distances(const Matrix& a, const Matrix& b);

/// (1/n) min_pi sum_i ||X_i - Y_pi(i)||^2 for equal-size samples.
double empirical_w2_sq(const Dataset& x, const Dataset& y);

/// (1/n) sum_i (x_(i) - y_(i))^2; inputs need not be sorted.
double quantile_w2_sq_1d(std::span<const double> x, std::span<const double> y);

/// Midpoint grid of G probabilities covering (delta, 1 - delta).
std::vector<double> quantile_grid(double delta, std::size_t grid_size);

/// Left-continuous empirical quantile function inf{x : F(x) >= s} of a sorted
/// sample, evaluated at every grid probability.
std::vector<double> empirical_quantiles(std::span<const double> sorted, std::span<const double> grid);

/// Sorted copy (stable on value).
std::vector<double> sorted_copy(std::span<const double> values);

/// Trimmed squared 2-Wasserstein distance between two 1D samples of any size,
/// (1/(1-2 delta)) int_delta^{1-delta} (F^{-1} - G^{-1})^2 ds, by the midpoint
/// rule on a grid of `grid_size` probabilities. delta must lie in [0, 0.5).
double trimmed_w2_sq_1d(std::span<const double> x, std::span<const double> y, double delta,
                        std::size_t grid_size = 512);

/// Column `col` of a matrix as a vector of doubles.
std::vector<double> column_values(const Matrix& m, Index col);

}  // namespace hwd
