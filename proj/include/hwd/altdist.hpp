#pragma once

// Alternative hybrid distances (marginal quantiles, polynomial moments) and the
// energy distance.

#include <cstddef>
#include <span>
#include <vector>

#include "hwd/matgauss.hpp"
#include "hwd/transport.hpp"

namespace hwd {

/// Per-coordinate empirical quantile functions on a shared probability grid.
struct MarginalProfile {
  std::vector<double> grid;  // G sorted probabilities in (0, 1)
  Matrix quantiles;          // d x G, rows nondecreasing
};

/// Quantiles of each coordinate of the standardized data (or raw data when
/// `standardized` is false) at the midpoint grid of size G.
MarginalProfile marginal_profile(const Dataset& x, std::size_t grid_size = 512, bool standardized = true);

/// Gaussian term on raw moments plus sum_j int (F_j^{-1} - G_j^{-1})^2 over the
/// coordinates of the standardized samples. Equal sample sizes pair order
/// statistics exactly; unequal sizes use the quantile grid of size G.
double marginal_hybrid_sq(const Dataset& x, const Dataset& y, std::size_t grid_size = 512,
                          bool standardized = true);

/// Representation used by marginal k-means; barycenters average quantiles.
struct MarginalSummary {
  GaussianSummary gaussian;
  MarginalProfile profile;
};

MarginalSummary marginal_summary(const Dataset& x, std::size_t grid_size = 512, bool standardized = true);
double marginal_distance_sq(const MarginalSummary& a, const MarginalSummary& b);
MarginalSummary marginal_barycenter(std::span<const MarginalSummary> parts, std::span<const double> weights,
                                    const BarycenterOptions& options = {});

/// Number of monomials of total degree 2..degree in d variables.
std::size_t monomial_count(std::size_t d, int degree);

/// Monomial features of each row, degrees 2..degree, graded lexicographic
/// (degree 2: x1x1, x1x2, ..., x2x2, ...; then degree 3; ...).
Matrix polynomial_features(const Matrix& x, int degree);

struct PolyMoments {
  int degree = 2;
  GaussianSummary moments;  // over the monomial features
};

/// Feature moments of the standardized sample. A near-singular feature
/// covariance gets the ridge 1e-8 tr/p.
PolyMoments poly_moments(const Dataset& x, int degree);

struct TransformedSummary {
  GaussianSummary raw;
  PolyMoments features;
};

TransformedSummary transformed_summary(const Dataset& x, int degree);
double transformed_distance_sq(const TransformedSummary& a, const TransformedSummary& b);
TransformedSummary transformed_barycenter(std::span<const TransformedSummary> parts, std::span<const double> weights,
                                          const BarycenterOptions& options = {});

/// G^2(X, Y) + G^2(Phi(X~), Phi(Y~)) with Phi the polynomial features of the
/// given degree. Degree 1 makes Phi linear, so the feature term is exactly 0.
double transformed_gaussian_sq(const Dataset& x, const Dataset& y, int degree);

/// 2 E||X - Y|| - E||X - X'|| - E||Y - Y'|| with every expectation taken over
/// all pairs of sample points (V-statistic). Nonnegative; zero for equal samples.
double energy_distance(const Dataset& x, const Dataset& y);

/// Energy statistic (clamped at 0) from a pooled distance matrix where `in_first[i]` says
/// which sample row i belongs to.
double energy_from_pooled(const Matrix& pooled_distances, std::span<const char> in_first);

}  // namespace hwd
