#include "hwd/hybrid.hpp"

#include <algorithm>
#include <numeric>

#include "hwd/error.hpp"
#include "hwd/parallel.hpp"
#include "hwd/rng.hpp"

namespace hwd {

namespace {

// Indices of the k rows of `points` nearest to x, ties to the lowest index.
std::vector<std::size_t> nearest_rows(const Matrix& points, const Vector& x, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    dist[static_cast<std::size_t>(i)] = {(points.row(i).transpose() - x).squaredNorm(), static_cast<std::size_t>(i)};
  }
  k = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

void check_same_reference(const HybridTransform& a, const HybridTransform& b) {
  if (a.ref_id != b.ref_id || a.shape.rows() != b.shape.rows() || a.shape.cols() != b.shape.cols()) {
    throw Error(ErrorKind::ReferenceMismatch, "transforms were built against different references");
  }
}

}  // namespace

TransportEstimate estimate_transport(const StandardizedDataset& xt, const ReferenceMeasure& ref,
                                     std::size_t m, std::uint64_t seed, std::size_t neighbors) {
  if (m < 1 || static_cast<Index>(m) != ref.size()) {
    throw Error(ErrorKind::InvalidParam, "subsample size must equal the reference anchor count");
  }
  if (static_cast<Index>(m) > xt.size()) {
    throw Error(ErrorKind::SubsampleError, "subsample size exceeds dataset '" + xt.id + "'");
  }
  if (xt.dim() != ref.dim()) throw Error(ErrorKind::DimensionError, "dataset and reference dimensions differ");
  if (neighbors < 1) throw Error(ErrorKind::InvalidParam, "neighbor count must be at least 1");

  Rng rng(seed);
  const auto picks = sample_without_replacement(static_cast<std::size_t>(xt.size()), m, rng);
  TransportEstimate est;
  est.neighbors = neighbors;
  est.anchors_from.resize(static_cast<Index>(m), xt.dim());
  for (std::size_t i = 0; i < m; ++i) est.anchors_from.row(static_cast<Index>(i)) = xt.points.row(static_cast<Index>(picks[i]));

  const Assignment assignment = hungarian(squared_distances(est.anchors_from, ref.anchors));
  est.perm = assignment.perm;
  est.assignment_cost = assignment.cost();
  est.matched_to.resize(static_cast<Index>(m), xt.dim());
  est.pulled_back.resize(static_cast<Index>(m), xt.dim());
  for (std::size_t i = 0; i < m; ++i) {
    const auto s = static_cast<Index>(est.perm[i]);
    est.matched_to.row(static_cast<Index>(i)) = ref.anchors.row(s);
    est.pulled_back.row(s) = est.anchors_from.row(static_cast<Index>(i));
  }
  est.evaluated_at_anchors.resize(static_cast<Index>(m), xt.dim());
  for (Index s = 0; s < static_cast<Index>(m); ++s) {
    est.evaluated_at_anchors.row(s) = transport_at(est, ref.anchors.row(s).transpose()).transpose();
  }
  return est;
}

Vector transport_at(const TransportEstimate& est, const Vector& x) {
  const auto near = nearest_rows(est.anchors_from, x, est.neighbors);
  Vector out = Vector::Zero(est.matched_to.cols());
  for (auto i : near) out += est.matched_to.row(static_cast<Index>(i)).transpose();
  return out / static_cast<double>(near.size());
}

double empirical_transport_cost(const TransportEstimate& est, const StandardizedDataset& xt) {
  double sum = 0.0;
  for (Index i = 0; i < xt.size(); ++i) {
    const Vector x = xt.points.row(i).transpose();
    sum += (x - transport_at(est, x)).squaredNorm();
  }
  return sum / static_cast<double>(xt.size());
}

HybridTransform transform_from_estimate(const StandardizedDataset& xt, const TransportEstimate& est,
                                        const ReferenceMeasure& ref, ShapeEncoding encoding) {
  HybridTransform t;
  t.mean = xt.source_mean;
  t.cov = xt.source_cov;
  t.shape = encoding == ShapeEncoding::pullback ? est.pulled_back : est.evaluated_at_anchors;
  t.inverse_shape = est.pulled_back;
  t.ref_id = ref.id;
  return t;
}

HybridTransform identity_shape_transform(const StandardizedDataset& xt, const ReferenceMeasure& ref) {
  HybridTransform t;
  t.mean = xt.source_mean;
  t.cov = xt.source_cov;
  t.shape = ref.anchors;
  t.inverse_shape = ref.anchors;
  t.ref_id = ref.id;
  t.shape_skipped = true;
  return t;
}

HybridTransform hybrid_transform(const Dataset& x, const ReferenceMeasure& ref, std::uint64_t seed,
                                 const HybridOptions& options) {
  const StandardizedDataset xt = standardize(x);
  const auto est = estimate_transport(xt, ref, static_cast<std::size_t>(ref.size()), seed, options.neighbors);
  return transform_from_estimate(xt, est, ref, options.encoding);
}

HybridDistanceBreakdown hybrid_distance_sq(const HybridTransform& a, const HybridTransform& b) {
  check_same_reference(a, b);
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionError, "transform dimensions differ");
  HybridDistanceBreakdown out;
  out.location_sq = (a.mean - b.mean).squaredNorm();
  out.scale_sq = bures_sq(a.cov, b.cov);
  out.shape_sq = (a.shape - b.shape).squaredNorm() / static_cast<double>(a.shape.rows());
  out.total_sq = out.location_sq + out.scale_sq + out.shape_sq;
  return out;
}

HybridTransform hybrid_barycenter(std::span<const HybridTransform> transforms, std::span<const double> weights,
                                  const BarycenterOptions& options) {
  if (transforms.empty()) throw Error(ErrorKind::InvalidParam, "barycenter of an empty set");
  check_simplex(weights, transforms.size());
  const HybridTransform& first = transforms.front();
  for (const auto& t : transforms) check_same_reference(first, t);

  std::size_t positive = 0, last_positive = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) ++positive, last_positive = j;
  }
  if (positive == 1) return transforms[last_positive];

  HybridTransform out;
  out.ref_id = first.ref_id;
  out.mean = Vector::Zero(first.dim());
  out.shape = Matrix::Zero(first.shape.rows(), first.shape.cols());
  out.inverse_shape = Matrix::Zero(first.shape.rows(), first.shape.cols());
  std::vector<SpdMatrix> covs;
  covs.reserve(transforms.size());
  out.shape_skipped = true;
  for (std::size_t j = 0; j < transforms.size(); ++j) {
    out.mean += weights[j] * transforms[j].mean;
    out.shape += weights[j] * transforms[j].shape;
    out.inverse_shape += weights[j] * transforms[j].inverse_shape;
    out.shape_skipped = out.shape_skipped && transforms[j].shape_skipped;
    covs.push_back(transforms[j].cov);
  }
  out.cov = bures_barycenter(covs, weights, options);
  return out;
}

Dataset materialize_barycenter(const HybridTransform& bary, const ReferenceMeasure& ref) {
  if (bary.ref_id != ref.id || bary.inverse_shape.rows() != ref.size()) {
    throw Error(ErrorKind::ReferenceMismatch, "barycenter is not bound to this reference");
  }
  if (bary.inverse_shape.cols() != bary.dim()) throw Error(ErrorKind::DimensionError, "shape dimension mismatch");
  const Matrix root = spd_sqrt(bary.cov).matrix();
  Matrix points = (bary.inverse_shape * root).rowwise() + bary.mean.transpose();
  return Dataset(std::move(points), "barycenter");
}

HybridModel fit_hybrid(std::span<const Dataset> datasets, std::uint64_t seed, const HybridOptions& options,
                       unsigned threads) {
  if (datasets.empty()) throw Error(ErrorKind::InvalidParam, "no datasets");
  HybridModel model;
  model.standardized.resize(datasets.size());
  parallel_for(datasets.size(), threads, [&](std::size_t j) { model.standardized[j] = standardize(datasets[j]); });
  model.reference = build_reference(model.standardized, options.m, derive_seed(seed, kReferenceStream));
  model.transforms.resize(datasets.size());
  parallel_for(datasets.size(), threads, [&](std::size_t j) {
    const auto est = estimate_transport(model.standardized[j], model.reference, options.m, derive_seed(seed, j),
                                        options.neighbors);
    model.transforms[j] = transform_from_estimate(model.standardized[j], est, model.reference, options.encoding);
  });
  return model;
}

}  // namespace hwd
