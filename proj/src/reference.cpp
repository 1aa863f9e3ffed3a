#include "hwd/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "hwd/error.hpp"

namespace hwd {

namespace {

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fingerprint(const ReferenceMeasure& ref) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, &ref.seed, sizeof ref.seed);
  const Index rows = ref.anchors.rows(), cols = ref.anchors.cols(), pooled = ref.pooled.rows();
  h = fnv1a(h, &rows, sizeof rows);
  h = fnv1a(h, &cols, sizeof cols);
  h = fnv1a(h, &pooled, sizeof pooled);
  h = fnv1a(h, ref.anchors.data(), sizeof(double) * static_cast<std::size_t>(ref.anchors.size()));
  h = fnv1a(h, ref.bandwidth.data(), sizeof(double) * static_cast<std::size_t>(ref.bandwidth.size()));
  return h;
}

}  // namespace

StandardizedDataset standardize(const Dataset& x) {
  const Index n = x.size(), d = x.dim();
  if (n <= d) {
    throw Error(ErrorKind::InsufficientData,
                "dataset '" + x.id + "' needs more observations than dimensions");
  }
  GaussianSummary moments = summarize(x.points);
  const double trace = moments.cov.trace();
  if (!(trace > 0.0)) throw Error(ErrorKind::InsufficientData, "dataset '" + x.id + "' is constant");

  const double ridge = 1e-8 * trace / static_cast<double>(d);
  const auto solver = Eigen::SelfAdjointEigenSolver<Matrix>(moments.cov.matrix(), Eigen::EigenvaluesOnly);
  bool degenerate = false;
  SpdMatrix used = moments.cov;
  if (solver.eigenvalues()[0] < ridge) {
    degenerate = true;
    used = SpdMatrix::assume_valid(moments.cov.matrix() + ridge * Matrix::Identity(d, d));
  }
  const Matrix inv_root = spd_inv_sqrt(used);
  StandardizedDataset out;
  out.points = (x.points.rowwise() - moments.mean.transpose()) * inv_root;
  out.source_mean = std::move(moments.mean);
  out.source_cov = moments.cov;
  out.source_cov_sqrt = spd_sqrt(used);
  out.degenerate = degenerate;
  out.id = x.id;
  return out;
}

Vector silverman_bandwidth(const Matrix& pooled) {
  const Index n = pooled.rows(), d = pooled.cols();
  if (n < 2) throw Error(ErrorKind::InsufficientData, "bandwidth needs at least two pooled points");
  const Vector mean = pooled.colwise().mean().transpose();
  const double factor =
      std::pow(4.0 / ((static_cast<double>(d) + 2.0) * static_cast<double>(n)), 1.0 / (static_cast<double>(d) + 4.0));
  Vector h(d);
  for (Index k = 0; k < d; ++k) {
    const double var = (pooled.col(k).array() - mean[k]).square().sum() / static_cast<double>(n - 1);
    if (!(var > 0.0)) throw Error(ErrorKind::InsufficientData, "pooled sample is constant in a coordinate");
    h[k] = std::sqrt(var) * factor;
  }
  return h;
}

ReferenceMeasure build_reference(std::span<const StandardizedDataset> standardized, std::size_t m,
                                 std::uint64_t seed) {
  if (m < 1) throw Error(ErrorKind::InvalidParam, "anchor count must be at least 1");
  if (standardized.empty()) throw Error(ErrorKind::InvalidParam, "no datasets for the reference");
  const Index d = standardized.front().dim();
  Index total = 0;
  for (const auto& s : standardized) {
    if (s.dim() != d) throw Error(ErrorKind::DimensionError, "standardized datasets differ in dimension");
    total += s.size();
  }

  ReferenceMeasure ref;
  ref.pooled.resize(total, d);
  Index row = 0;
  for (const auto& s : standardized) {
    ref.pooled.middleRows(row, s.size()) = s.points;
    row += s.size();
  }
  ref.bandwidth = silverman_bandwidth(ref.pooled);
  ref.seed = seed;

  Rng rng(seed);
  ref.anchors = sample_reference(ref, m, rng);
  ref.anchor_density.resize(static_cast<Index>(m));
  for (Index s = 0; s < static_cast<Index>(m); ++s) {
    ref.anchor_density[s] = kde_density(ref, ref.anchors.row(s).transpose());
  }
  ref.id = fingerprint(ref);
  return ref;
}

double log_kde_density(const ReferenceMeasure& ref, const Vector& z) {
  if (z.size() != ref.pooled.cols()) throw Error(ErrorKind::DimensionError, "query dimension mismatch");
  const Index n = ref.pooled.rows(), d = ref.pooled.cols();
  const Vector inv_h = ref.bandwidth.cwiseInverse();
  double log_norm = -std::log(static_cast<double>(n));
  for (Index k = 0; k < d; ++k) log_norm -= std::log(ref.bandwidth[k] * std::sqrt(2.0 * std::numbers::pi));

  Vector exponents(n);
  for (Index i = 0; i < n; ++i) {
    exponents[i] = -0.5 * ((ref.pooled.row(i).transpose() - z).cwiseProduct(inv_h)).squaredNorm();
  }
  const double top = exponents.maxCoeff();
  const double sum = (exponents.array() - top).exp().sum();
  return log_norm + top + std::log(sum);
}

double kde_density(const ReferenceMeasure& ref, const Vector& z) { return std::exp(log_kde_density(ref, z)); }

Matrix sample_reference(const ReferenceMeasure& ref, std::size_t count, Rng& rng) {
  const Index d = ref.pooled.cols();
  Matrix out(static_cast<Index>(count), d);
  for (Index s = 0; s < static_cast<Index>(count); ++s) {
    const auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(ref.pooled.rows())));
    for (Index k = 0; k < d; ++k) out(s, k) = ref.pooled(i, k) + ref.bandwidth[k] * rng.normal();
  }
  return out;
}

}  // namespace hwd
