#pragma once

// Standardization of datasets and the pooled kernel-density reference measure.

#include <cstdint>
#include <span>
#include <string>

#include "hwd/matgauss.hpp"
#include "hwd/rng.hpp"
#include "hwd/transport.hpp"

namespace hwd {

/// (X - mean) Sigma^{-1/2} for the sample moments of X.
struct StandardizedDataset {
  Matrix points;
  Vector source_mean;
  SpdMatrix source_cov;
  SpdMatrix source_cov_sqrt;
  bool degenerate = false;  // covariance was rank deficient and got a ridge
  std::string id;

  Index size() const noexcept { return points.rows(); }
  Index dim() const noexcept { return points.cols(); }
};

/// Requires n >= d + 1. A covariance whose smallest eigenvalue is below
/// 1e-8 tr/d is regularized by that ridge and flagged degenerate; a zero
/// covariance throws InsufficientData.
StandardizedDataset standardize(const Dataset& x);

/// Kernel density estimate of the pooled standardized points and the anchor
/// sample U_1..U_m drawn from it. Every dataset's transport is evaluated at
/// the same anchors.
struct ReferenceMeasure {
  Matrix pooled;          // n_pool x d
  Vector bandwidth;       // per-coordinate Gaussian kernel widths
  Matrix anchors;         // m x d
  Vector anchor_density;  // kde_density at each anchor
  std::uint64_t seed = 0;
  std::uint64_t id = 0;   // fingerprint of the contents; transforms record it

  Index size() const noexcept { return anchors.rows(); }
  Index dim() const noexcept { return anchors.cols(); }
};

/// h_k = sd_k (4 / ((d + 2) n))^{1/(d+4)} over the pooled sample.
Vector silverman_bandwidth(const Matrix& pooled);

ReferenceMeasure build_reference(std::span<const StandardizedDataset> standardized, std::size_t m,
                                 std::uint64_t seed);

/// Product-Gaussian KDE at z, computed in log space.
double log_kde_density(const ReferenceMeasure& ref, const Vector& z);
double kde_density(const ReferenceMeasure& ref, const Vector& z);

/// `count` fresh draws from the KDE: a uniform pooled point plus kernel noise.
Matrix sample_reference(const ReferenceMeasure& ref, std::size_t count, Rng& rng);

}  // namespace hwd
