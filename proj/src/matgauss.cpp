#include "hwd/matgauss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hwd/error.hpp"

namespace hwd {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kEigenTol = 1e-10;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidMatrix, "eigendecomposition failed");
  }
  return solver;
}

// Eigenvalues in [-1e-10 lambda_max, 0) become 0.
Vector clamped_eigenvalues(const Vector& values) {
  Vector out = values;
  for (Index i = 0; i < out.size(); ++i) out[i] = std::max(out[i], 0.0);
  return out;
}

Matrix apply_spectral(const Matrix& m, double (*f)(double)) {
  const auto solver = eigensolve(m);
  Vector values = clamped_eigenvalues(solver.eigenvalues());
  for (Index i = 0; i < values.size(); ++i) values[i] = f(values[i]);
  const Matrix& v = solver.eigenvectors();
  return symmetrized(v * values.asDiagonal() * v.transpose());
}

double sqrt_of(double x) { return std::sqrt(x); }

// sum of sqrt of the clamped eigenvalues, i.e. tr(M^{1/2}) for symmetric PSD M.
double trace_sqrt(const Matrix& m) {
  const auto solver = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrized(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidMatrix, "eigendecomposition failed");
  }
  double sum = 0.0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) sum += std::sqrt(std::max(solver.eigenvalues()[i], 0.0));
  return sum;
}

SpdMatrix ridged(const SpdMatrix& c) {
  const Index d = c.dim();
  const double eps = 1e-10 * std::max(c.trace(), 0.0) / static_cast<double>(d);
  const auto solver = Eigen::SelfAdjointEigenSolver<Matrix>(c.matrix(), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues()[0] >= eps && eps > 0.0) return c;
  // Zero matrices get an absolute ridge so the inverse square root exists.
  const double ridge = eps > 0.0 ? eps : 1e-300;
  return SpdMatrix::assume_valid(c.matrix() + ridge * Matrix::Identity(d, d));
}

}  // namespace

SpdMatrix::SpdMatrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::InvalidMatrix, "matrix must be square and nonempty");
  }
  if (!m.allFinite()) throw Error(ErrorKind::InvalidMatrix, "matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw Error(ErrorKind::InvalidMatrix, "matrix is not symmetric");
  }
  m_ = symmetrized(m);
  const auto solver = Eigen::SelfAdjointEigenSolver<Matrix>(m_, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  const double largest = std::max(std::abs(ev[ev.size() - 1]), std::abs(ev[0]));
  if (ev[0] < -kEigenTol * largest) {
    throw Error(ErrorKind::NotPsd, "smallest eigenvalue " + std::to_string(ev[0]));
  }
}

SpdMatrix SpdMatrix::assume_valid(Matrix m) {
  SpdMatrix out;
  out.m_ = symmetrized(m);
  return out;
}

SpdMatrix SpdMatrix::identity(Index dim) { return assume_valid(Matrix::Identity(dim, dim)); }

GaussianSummary summarize(const Matrix& points) {
  const Index n = points.rows();
  if (n < 1) throw Error(ErrorKind::InsufficientData, "no observations");
  Vector mean = points.colwise().mean().transpose();
  if (n == 1) return {mean, SpdMatrix::assume_valid(Matrix::Zero(points.cols(), points.cols()))};
  const Matrix centered = points.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return {std::move(mean), SpdMatrix::assume_valid(std::move(cov))};
}

SpdMatrix spd_sqrt(const SpdMatrix& a) {
  return SpdMatrix::assume_valid(apply_spectral(a.matrix(), sqrt_of));
}

Matrix spd_inv_sqrt(const SpdMatrix& a, double floor) {
  const auto solver = eigensolve(a.matrix());
  Vector values = solver.eigenvalues();
  for (Index i = 0; i < values.size(); ++i) {
    const double v = std::max(values[i], floor);
    if (v <= 0.0) throw Error(ErrorKind::InvalidMatrix, "matrix is singular");
    values[i] = 1.0 / std::sqrt(v);
  }
  const Matrix& vecs = solver.eigenvectors();
  return symmetrized(vecs * values.asDiagonal() * vecs.transpose());
}

double bures_sq(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionError, "covariance dimensions differ");
  if (a == b) return 0.0;
  // Fixed argument order keeps the result bitwise symmetric.
  const bool swap = std::lexicographical_compare(b.matrix().data(), b.matrix().data() + b.matrix().size(),
                                                 a.matrix().data(), a.matrix().data() + a.matrix().size());
  const SpdMatrix& first = swap ? b : a;
  const SpdMatrix& second = swap ? a : b;
  const Matrix root = spd_sqrt(first).matrix();
  const double cross = trace_sqrt(root * second.matrix() * root);
  return std::max(0.0, a.trace() + b.trace() - 2.0 * cross);
}

double gaussian_wasserstein_sq(const GaussianSummary& p, const GaussianSummary& q) {
  if (p.dim() != q.dim() || p.cov.dim() != q.cov.dim()) {
    throw Error(ErrorKind::DimensionError, "Gaussian summaries differ in dimension");
  }
  return (p.mean - q.mean).squaredNorm() + bures_sq(p.cov, q.cov);
}

void check_simplex(std::span<const double> weights, std::size_t expected_size) {
  if (weights.size() != expected_size) {
    throw Error(ErrorKind::InvalidParam, "weight count does not match input count");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidParam, "weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::InvalidParam, "weights must sum to 1");
}

double barycenter_residual(const SpdMatrix& s, std::span<const SpdMatrix> covs,
                           std::span<const double> weights) {
  const Matrix root = spd_sqrt(s).matrix();
  Matrix mapped = Matrix::Zero(s.dim(), s.dim());
  for (std::size_t j = 0; j < covs.size(); ++j) {
    if (weights[j] == 0.0) continue;
    mapped += weights[j] * spd_sqrt(SpdMatrix::assume_valid(root * covs[j].matrix() * root)).matrix();
  }
  const double norm = s.matrix().norm();
  return norm > 0.0 ? (s.matrix() - mapped).norm() / norm : mapped.norm();
}

SpdMatrix bures_barycenter(std::span<const SpdMatrix> covs, std::span<const double> weights,
                           const BarycenterOptions& options) {
  if (covs.empty()) throw Error(ErrorKind::InvalidParam, "barycenter of an empty set");
  check_simplex(weights, covs.size());
  const Index d = covs.front().dim();
  for (const auto& c : covs) {
    if (c.dim() != d) throw Error(ErrorKind::DimensionError, "covariance dimensions differ");
  }

  // Degenerate weightings and identical inputs are exact fixed points.
  std::size_t positive = 0, last_positive = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) {
      ++positive;
      last_positive = j;
    }
  }
  if (positive == 1) return covs[last_positive];
  if (std::all_of(covs.begin(), covs.end(), [&](const SpdMatrix& c) { return c == covs.front(); })) {
    return covs.front();
  }

  std::vector<SpdMatrix> regular;
  regular.reserve(covs.size());
  for (const auto& c : covs) regular.push_back(ridged(c));

  Matrix current = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < regular.size(); ++j) current += weights[j] * regular[j].matrix();
  current = symmetrized(current);

  double residual = 0.0;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const SpdMatrix s = SpdMatrix::assume_valid(current);
    const auto solver = eigensolve(s.matrix());
    Vector root_vals = clamped_eigenvalues(solver.eigenvalues());
    Vector inv_root_vals(root_vals.size());
    for (Index i = 0; i < root_vals.size(); ++i) {
      root_vals[i] = std::sqrt(root_vals[i]);
      inv_root_vals[i] = root_vals[i] > 0.0 ? 1.0 / root_vals[i] : 0.0;
    }
    const Matrix& v = solver.eigenvectors();
    const Matrix root = v * root_vals.asDiagonal() * v.transpose();
    const Matrix inv_root = v * inv_root_vals.asDiagonal() * v.transpose();

    Matrix mapped = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < regular.size(); ++j) {
      if (weights[j] == 0.0) continue;
      mapped += weights[j] * apply_spectral(symmetrized(root * regular[j].matrix() * root), sqrt_of);
    }
    const double norm = current.norm();
    residual = norm > 0.0 ? (current - mapped).norm() / norm : mapped.norm();
    if (residual <= options.tolerance) return s;
    if (iter == options.max_iter) break;
    current = symmetrized(inv_root * mapped * mapped * inv_root);
  }
  throw ConvergenceError("Bures barycenter did not converge", residual);
}

GaussianSummary gaussian_barycenter(std::span<const GaussianSummary> parts,
                                    std::span<const double> weights,
                                    const BarycenterOptions& options) {
  if (parts.empty()) throw Error(ErrorKind::InvalidParam, "barycenter of an empty set");
  check_simplex(weights, parts.size());
  Vector mean = Vector::Zero(parts.front().dim());
  std::vector<SpdMatrix> covs;
  covs.reserve(parts.size());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (parts[j].dim() != mean.size()) throw Error(ErrorKind::DimensionError, "summary dimensions differ");
    mean += weights[j] * parts[j].mean;
    covs.push_back(parts[j].cov);
  }
  std::size_t positive = 0, last_positive = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) ++positive, last_positive = j;
  }
  if (positive == 1) return parts[last_positive];
  return {std::move(mean), bures_barycenter(covs, weights, options)};
}

}  // namespace hwd
