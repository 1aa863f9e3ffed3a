#pragma once

// Positive-semidefinite matrix algebra and the Gaussian (Bures) Wasserstein geometry.

#include <span>

#include <Eigen/Dense>

namespace hwd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric positive-semidefinite matrix.
///
/// Construction checks symmetry (relative tolerance 1e-10) and that no
/// eigenvalue lies below -1e-10 times the largest one; the stored matrix is the
/// exact symmetrization (A + A^T) / 2 of the input.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m);

  /// Skips the eigenvalue check. For matrices that are SPD by construction
  /// (sample covariances, products B A B); still symmetrizes.
  static SpdMatrix assume_valid(Matrix m);
  static SpdMatrix identity(Index dim);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  double trace() const { return m_.trace(); }

  friend bool operator==(const SpdMatrix& a, const SpdMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

struct GaussianSummary {
  Vector mean;
  SpdMatrix cov;

  Index dim() const noexcept { return mean.size(); }
};

/// Sample mean and covariance (denominator n - 1) of the rows of `points`.
/// A single observation gets a zero covariance.
GaussianSummary summarize(const Matrix& points);

SpdMatrix spd_sqrt(const SpdMatrix& a);

/// A^{-1/2}. Eigenvalues at or below `floor` are raised to `floor` first.
Matrix spd_inv_sqrt(const SpdMatrix& a, double floor = 0.0);

/// tr(A) + tr(B) - 2 tr((A^{1/2} B A^{1/2})^{1/2}), clamped at zero.
double bures_sq(const SpdMatrix& a, const SpdMatrix& b);

/// ||mu_P - mu_Q||^2 + bures_sq(Sigma_P, Sigma_Q).
double gaussian_wasserstein_sq(const GaussianSummary& p, const GaussianSummary& q);

struct BarycenterOptions {
  int max_iter = 500;
  double tolerance = 1e-8;
};

/// ||S - sum_j w_j (S^{1/2} C_j S^{1/2})^{1/2}||_F / ||S||_F.
double barycenter_residual(const SpdMatrix& s, std::span<const SpdMatrix> covs,
                           std::span<const double> weights);

/// Weighted Bures-Wasserstein barycenter of covariance matrices.
///
/// Iterates S <- S^{-1/2} (sum_j w_j (S^{1/2} C_j S^{1/2})^{1/2})^2 S^{-1/2}
/// from the arithmetic mean until barycenter_residual <= tolerance. Inputs whose
/// smallest eigenvalue is below 1e-10 tr(C)/d get that ridge added first.
/// Throws ConvergenceError (carrying the last residual) after max_iter.
SpdMatrix bures_barycenter(std::span<const SpdMatrix> covs, std::span<const double> weights,
                           const BarycenterOptions& options = {});

/// Barycenter of Gaussian summaries: weighted mean of means, Bures barycenter of covariances.
GaussianSummary gaussian_barycenter(std::span<const GaussianSummary> parts,
                                    std::span<const double> weights,
                                    const BarycenterOptions& options = {});

/// Throws InvalidParam unless weights are nonnegative and sum to 1 within 1e-12.
void check_simplex(std::span<const double> weights, std::size_t expected_size);

}  // namespace hwd
