#include "hwd/altdist.hpp"

#include <algorithm>
#include <cmath>

#include "hwd/error.hpp"
#include "hwd/reference.hpp"

namespace hwd {

namespace {

Matrix marginal_source(const Dataset& x, bool standardized) {
  return standardized ? standardize(x).points : x.points;
}

double order_statistic_sq(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) sum += quantile_w2_sq_1d(column_values(a, j), column_values(b, j));
  return sum;
}

SpdMatrix ridge_if_singular(const SpdMatrix& c) {
  const Index p = c.dim();
  const double ridge = 1e-8 * std::max(c.trace(), 0.0) / static_cast<double>(p);
  const auto solver = Eigen::SelfAdjointEigenSolver<Matrix>(c.matrix(), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues()[0] >= ridge) return c;
  return SpdMatrix::assume_valid(c.matrix() + ridge * Matrix::Identity(p, p));
}

// Appends every nondecreasing index tuple of the given length, lexicographically.
void monomial_tuples(std::size_t d, int length, std::size_t start, std::vector<std::size_t>& prefix,
                     std::vector<std::vector<std::size_t>>& out) {
  if (static_cast<int>(prefix.size()) == length) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t i = start; i < d; ++i) {
    prefix.push_back(i);
    monomial_tuples(d, length, i, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<std::size_t>> monomials(std::size_t d, int degree) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> prefix;
  for (int k = 2; k <= degree; ++k) monomial_tuples(d, k, 0, prefix, out);
  return out;
}

}  // namespace

MarginalProfile marginal_profile(const Dataset& x, std::size_t grid_size, bool standardized) {
  const Matrix pts = marginal_source(x, standardized);
  MarginalProfile out;
  out.grid = quantile_grid(0.0, grid_size);
  out.quantiles.resize(pts.cols(), static_cast<Index>(grid_size));
  for (Index j = 0; j < pts.cols(); ++j) {
    const auto q = empirical_quantiles(sorted_copy(column_values(pts, j)), out.grid);
    for (std::size_t g = 0; g < grid_size; ++g) out.quantiles(j, static_cast<Index>(g)) = q[g];
  }
  return out;
}

double marginal_hybrid_sq(const Dataset& x, const Dataset& y, std::size_t grid_size, bool standardized) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::DimensionError, "datasets differ in dimension");
  const double gaussian = gaussian_wasserstein_sq(summarize(x.points), summarize(y.points));
  if (x.size() == y.size()) {
    return gaussian + order_statistic_sq(marginal_source(x, standardized), marginal_source(y, standardized));
  }
  const auto px = marginal_profile(x, grid_size, standardized);
  const auto py = marginal_profile(y, grid_size, standardized);
  return gaussian + (px.quantiles - py.quantiles).squaredNorm() / static_cast<double>(grid_size);
}

MarginalSummary marginal_summary(const Dataset& x, std::size_t grid_size, bool standardized) {
  return {summarize(x.points), marginal_profile(x, grid_size, standardized)};
}

double marginal_distance_sq(const MarginalSummary& a, const MarginalSummary& b) {
  if (a.profile.quantiles.rows() != b.profile.quantiles.rows() ||
      a.profile.quantiles.cols() != b.profile.quantiles.cols()) {
    throw Error(ErrorKind::DimensionError, "marginal profiles differ in shape");
  }
  return gaussian_wasserstein_sq(a.gaussian, b.gaussian) +
         (a.profile.quantiles - b.profile.quantiles).squaredNorm() / static_cast<double>(a.profile.grid.size());
}

MarginalSummary marginal_barycenter(std::span<const MarginalSummary> parts, std::span<const double> weights,
                                    const BarycenterOptions& options) {
  if (parts.empty()) throw Error(ErrorKind::InvalidParam, "barycenter of an empty set");
  check_simplex(weights, parts.size());
  std::vector<GaussianSummary> gauss;
  gauss.reserve(parts.size());
  MarginalSummary out;
  out.profile.grid = parts.front().profile.grid;
  out.profile.quantiles = Matrix::Zero(parts.front().profile.quantiles.rows(), parts.front().profile.quantiles.cols());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    gauss.push_back(parts[j].gaussian);
    out.profile.quantiles += weights[j] * parts[j].profile.quantiles;
  }
  out.gaussian = gaussian_barycenter(gauss, weights, options);
  return out;
}

std::size_t monomial_count(std::size_t d, int degree) {
  // C(d + k - 1, k) monomials of exact degree k.
  std::size_t total = 0;
  for (int k = 2; k <= degree; ++k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(d + static_cast<std::size_t>(i) - 1) / i;
    total += static_cast<std::size_t>(std::llround(c));
  }
  return total;
}

Matrix polynomial_features(const Matrix& x, int degree) {
  if (degree < 2) throw Error(ErrorKind::InvalidParam, "polynomial features need degree >= 2");
  const auto terms = monomials(static_cast<std::size_t>(x.cols()), degree);
  Matrix out(x.rows(), static_cast<Index>(terms.size()));
  for (Index i = 0; i < x.rows(); ++i) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
      double v = 1.0;
      for (auto k : terms[t]) v *= x(i, static_cast<Index>(k));
      out(i, static_cast<Index>(t)) = v;
    }
  }
  return out;
}

PolyMoments poly_moments(const Dataset& x, int degree) {
  const Matrix features = polynomial_features(standardize(x).points, degree);
  GaussianSummary m = summarize(features);
  m.cov = ridge_if_singular(m.cov);
  return {degree, std::move(m)};
}

TransformedSummary transformed_summary(const Dataset& x, int degree) {
  return {summarize(x.points), poly_moments(x, degree)};
}

double transformed_distance_sq(const TransformedSummary& a, const TransformedSummary& b) {
  if (a.features.degree != b.features.degree) throw Error(ErrorKind::InvalidParam, "feature degrees differ");
  return gaussian_wasserstein_sq(a.raw, b.raw) + gaussian_wasserstein_sq(a.features.moments, b.features.moments);
}

TransformedSummary transformed_barycenter(std::span<const TransformedSummary> parts, std::span<const double> weights,
                                          const BarycenterOptions& options) {
  if (parts.empty()) throw Error(ErrorKind::InvalidParam, "barycenter of an empty set");
  check_simplex(weights, parts.size());
  std::vector<GaussianSummary> raw, feat;
  for (const auto& p : parts) {
    raw.push_back(p.raw);
    feat.push_back(p.features.moments);
  }
  return {gaussian_barycenter(raw, weights, options),
          {parts.front().features.degree, gaussian_barycenter(feat, weights, options)}};
}

double transformed_gaussian_sq(const Dataset& x, const Dataset& y, int degree) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::DimensionError, "datasets differ in dimension");
  if (degree < 1) throw Error(ErrorKind::InvalidParam, "degree must be at least 1");
  const double raw = gaussian_wasserstein_sq(summarize(x.points), summarize(y.points));
  if (degree == 1) return raw;
  return raw + gaussian_wasserstein_sq(poly_moments(x, degree).moments, poly_moments(y, degree).moments);
}

double energy_from_pooled(const Matrix& d, std::span<const char> in_first) {
  double cross = 0.0, within_a = 0.0, within_b = 0.0;
  double na = 0.0, nb = 0.0;
  for (char f : in_first) (f ? na : nb) += 1.0;
  const auto n = static_cast<Index>(in_first.size());
  for (Index i = 0; i < n; ++i) {
    const bool a = in_first[static_cast<std::size_t>(i)] != 0;
    for (Index j = i + 1; j < n; ++j) {
      const bool b = in_first[static_cast<std::size_t>(j)] != 0;
      if (a && b) within_a += d(i, j);
      else if (!a && !b) within_b += d(i, j);
      else cross += d(i, j);
    }
  }
  // Unordered pair sums; each within sum counts every ordered pair twice.
  return std::max(0.0, 2.0 * cross / (na * nb) - 2.0 * within_a / (na * na) - 2.0 * within_b / (nb * nb));
}

double energy_distance(const Dataset& first, const Dataset& second) {
  if (first.size() < 2 || second.size() < 2) throw Error(ErrorKind::InsufficientData, "energy distance needs n, m >= 2");
  if (first.dim() != second.dim()) throw Error(ErrorKind::DimensionError, "datasets differ in dimension");
  // Canonical argument order keeps the result bitwise symmetric.
  const auto& pa = first.points;
  const auto& pb = second.points;
  const bool swap = pa.rows() != pb.rows()
                        ? pb.rows() < pa.rows()
                        : std::lexicographical_compare(pb.data(), pb.data() + pb.size(), pa.data(), pa.data() + pa.size());
  const Dataset& x = swap ? second : first;
  const Dataset& y = swap ? first : second;
  double cross = 0.0, within_x = 0.0, within_y = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    for (Index j = 0; j < y.size(); ++j) cross += (x.points.row(i) - y.points.row(j)).norm();
    for (Index j = i + 1; j < x.size(); ++j) within_x += (x.points.row(i) - x.points.row(j)).norm();
  }
  for (Index i = 0; i < y.size(); ++i) {
    for (Index j = i + 1; j < y.size(); ++j) within_y += (y.points.row(i) - y.points.row(j)).norm();
  }
  const auto n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  const double value = 2.0 * cross / (n * m) - 2.0 * within_x / (n * n) - 2.0 * within_y / (m * m);
  return std::max(0.0, value);
}

}  // namespace hwd
