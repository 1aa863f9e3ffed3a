#include "hwd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hwd/error.hpp"

namespace hwd {

Dataset::Dataset(Matrix pts, std::string label) : points(std::move(pts)), id(std::move(label)) {
  if (points.rows() < 1 || points.cols() < 1) {
    throw Error(ErrorKind::InsufficientData, "dataset '" + id + "' is empty");
  }
  if (!points.allFinite()) {
    throw Error(ErrorKind::InvalidParam, "dataset '" + id + "' has NaN or Inf entries");
  }
}

Assignment hungarian(const Matrix& costs) {
  if (costs.rows() != costs.cols()) throw Error(ErrorKind::DimensionError, "cost matrix is not square");
  const auto n = static_cast<std::size_t>(costs.rows());
  if (n == 0) return {};
  if (!costs.allFinite()) throw Error(ErrorKind::InvalidCost, "cost matrix has NaN or Inf entries");

  // Shortest augmenting paths with row potentials u and column potentials v;
  // indices are 1-based, column 0 is the virtual source.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = costs(static_cast<Index>(i0 - 1), static_cast<Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.total += costs(static_cast<Index>(i), static_cast<Index>(out.perm[i]));
  return out;
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw Error(ErrorKind::DimensionError, "point dimensions differ");
  Matrix d(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
  return d;
}

double empirical_w2_sq(const Dataset& x, const Dataset& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::SizeError, "samples differ in size");
  if (x.dim() != y.dim()) throw Error(ErrorKind::SizeError, "samples differ in dimension");
  return hungarian(squared_distances(x.points, y.points)).cost();
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::stable_sort(out.begin(), out.end());
  return out;
}

double quantile_w2_sq_1d(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::SizeError, "samples differ in size");
  if (x.empty()) throw Error(ErrorKind::SizeError, "samples are empty");
  const auto xs = sorted_copy(x);
  const auto ys = sorted_copy(y);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += (xs[i] - ys[i]) * (xs[i] - ys[i]);
  return sum / static_cast<double>(xs.size());
}

std::vector<double> quantile_grid(double delta, std::size_t grid_size) {
  if (!(delta >= 0.0 && delta < 0.5)) throw Error(ErrorKind::InvalidTrim, "trim must lie in [0, 0.5)");
  if (grid_size == 0) throw Error(ErrorKind::InvalidParam, "grid size must be positive");
  std::vector<double> grid(grid_size);
  const double width = (1.0 - 2.0 * delta) / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) grid[i] = delta + (static_cast<double>(i) + 0.5) * width;
  return grid;
}

std::vector<double> empirical_quantiles(std::span<const double> sorted, std::span<const double> grid) {
  if (sorted.empty()) throw Error(ErrorKind::InsufficientData, "empty sample");
  const auto n = static_cast<double>(sorted.size());
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    // Smallest order statistic k (1-based) with k/n >= s.
    auto k = static_cast<std::size_t>(std::ceil(n * grid[g]));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    out[g] = sorted[k - 1];
  }
  return out;
}

double trimmed_w2_sq_1d(std::span<const double> x, std::span<const double> y, double delta,
                        std::size_t grid_size) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InsufficientData, "samples must be nonempty");
  const auto grid = quantile_grid(delta, grid_size);
  const auto qx = empirical_quantiles(sorted_copy(x), grid);
  const auto qy = empirical_quantiles(sorted_copy(y), grid);
  double sum = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) sum += (qx[g] - qy[g]) * (qx[g] - qy[g]);
  return sum / static_cast<double>(grid.size());
}

std::vector<double> column_values(const Matrix& m, Index col) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, col);
  return out;
}

}  // namespace hwd
