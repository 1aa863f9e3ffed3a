#pragma once

// The hybrid transform: a closed-form Gaussian location-scale part plus a shape
// part given by an estimated transport map between the standardized data and a
// shared reference measure, evaluated at the reference anchors.

#include <cstdint>
#include <span>
#include <vector>

#include "hwd/matgauss.hpp"
#include "hwd/reference.hpp"
#include "hwd/transport.hpp"

namespace hwd {

/// Which discrete transport values form the shape block of a transform.
enum class ShapeEncoding {
  /// Anchor U_s paired with the subsample point the optimal assignment sends to
  /// it (the map from the reference to the standardized data, exact at anchors).
  pullback,
  /// 1-NN extension of the subsample-to-anchor assignment evaluated at U_s.
  forward_nn,
};

/// Permutation-smoothing estimate of the transport between a standardized
/// dataset and the reference anchors.
struct TransportEstimate {
  Matrix anchors_from;          // m x d subsample of the standardized data
  Matrix matched_to;            // row i: anchor assigned to anchors_from row i
  Matrix evaluated_at_anchors;  // row s: forward map at U_s (r-NN over the subsample)
  Matrix pulled_back;           // row s: subsample point assigned to U_s
  std::vector<std::size_t> perm;  // subsample i -> anchor perm[i]
  std::size_t neighbors = 1;
  double assignment_cost = 0.0;   // mean squared distance of the optimal matching
};

/// Draws m points without replacement from xt (seeded), matches them to the m
/// anchors by the Hungarian algorithm on squared distances, and extends the
/// matching by nearest-neighbor regression over the subsample.
/// `m` must equal ref.size(); m > xt.size() throws SubsampleError.
TransportEstimate estimate_transport(const StandardizedDataset& xt, const ReferenceMeasure& ref,
                                     std::size_t m, std::uint64_t seed, std::size_t neighbors = 1);

/// The extended map at an arbitrary point: mean of the matched anchors of the
/// `neighbors` nearest subsample points (ties to the lowest index).
Vector transport_at(const TransportEstimate& est, const Vector& x);

/// (1/n) sum_i ||x_i - T(x_i)||^2 over every standardized point.
double empirical_transport_cost(const TransportEstimate& est, const StandardizedDataset& xt);

struct HybridTransform {
  Vector mean;
  SpdMatrix cov;
  Matrix shape;          // m x d, compared by the shape term
  Matrix inverse_shape;  // m x d, reference-to-data values used to materialize
  std::uint64_t ref_id = 0;
  bool shape_skipped = false;  // shape set to the identity map (pre-test did not reject)

  Index dim() const noexcept { return mean.size(); }
  Index anchors() const noexcept { return shape.rows(); }
};

struct HybridOptions {
  std::size_t m = 100;
  std::size_t neighbors = 1;
  ShapeEncoding encoding = ShapeEncoding::pullback;
};

struct HybridDistanceBreakdown {
  double location_sq = 0.0;
  double scale_sq = 0.0;
  double shape_sq = 0.0;
  double total_sq = 0.0;
};

HybridTransform transform_from_estimate(const StandardizedDataset& xt, const TransportEstimate& est,
                                        const ReferenceMeasure& ref, ShapeEncoding encoding);

/// Transform whose shape is the identity at the anchors (psi = 0).
HybridTransform identity_shape_transform(const StandardizedDataset& xt, const ReferenceMeasure& ref);

/// Sample moments of x plus the shape block of its standardized transport to the reference.
HybridTransform hybrid_transform(const Dataset& x, const ReferenceMeasure& ref, std::uint64_t seed,
                                 const HybridOptions& options = {});

/// location ||mu_a - mu_b||^2, scale B^2(Sigma_a, Sigma_b),
/// shape (1/m) sum_s ||shape_a(s) - shape_b(s)||^2.
HybridDistanceBreakdown hybrid_distance_sq(const HybridTransform& a, const HybridTransform& b);

/// Component-wise barycenter: weighted mean, Bures barycenter, weighted shape blocks.
HybridTransform hybrid_barycenter(std::span<const HybridTransform> transforms, std::span<const double> weights,
                                  const BarycenterOptions& options = {});

/// m points mu + Sigma^{1/2} y_s, with y_s the inverse-shape row at anchor s.
Dataset materialize_barycenter(const HybridTransform& bary, const ReferenceMeasure& ref);

/// Everything needed to compare a collection of datasets.
struct HybridModel {
  std::vector<StandardizedDataset> standardized;
  ReferenceMeasure reference;
  std::vector<HybridTransform> transforms;
};

/// Seed stream used for the reference measure of a model.
inline constexpr std::uint64_t kReferenceStream = 0x5245464552454e43ULL;

/// Standardizes every dataset, builds the pooled reference with
/// derive_seed(seed, kReferenceStream), and estimates transform j with
/// derive_seed(seed, j). Results do not depend on `threads`.
HybridModel fit_hybrid(std::span<const Dataset> datasets, std::uint64_t seed, const HybridOptions& options = {},
                       unsigned threads = 1);

}  // namespace hwd
