#pragma once

// k-means in every distance mode, hierarchical merging, mode seeking, elbow
// curves and the adjusted Rand index.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "hwd/altdist.hpp"
#include "hwd/distance_matrix.hpp"
#include "hwd/hybrid.hpp"
#include "hwd/matgauss.hpp"

namespace hwd {

enum class ClusterMode { hybrid, gaussian, euclidean_mds, exact1d, marginal, transformed, energy_medoid };

std::string_view to_string(ClusterMode mode);
ClusterMode parse_cluster_mode(std::string_view name);

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  std::size_t restarts = 5;
  unsigned threads = 1;  // restarts run concurrently
  BarycenterOptions barycenter;
};

template <class Centroid>
struct ClusterResult {
  std::vector<std::size_t> labels;
  std::vector<Centroid> centroids;
  double within_cost = 0.0;          // sum of squared distances to own centroid
  std::size_t iterations = 0;        // assignment steps of the kept run
  std::vector<double> cost_trace;    // within cost after each assignment step
  ClusterMode mode = ClusterMode::hybrid;
};

/// First index uniform, then each next index with probability proportional to
/// its squared distance to the nearest chosen one. When every remaining weight
/// is zero the next index is uniform among the unchosen.
std::vector<std::size_t> kmeanspp_seed(const std::function<double(std::size_t, std::size_t)>& dist_sq,
                                       std::size_t n, std::size_t k, std::uint64_t seed);

// Metrics for the generic Lloyd engine: squared distance plus the minimizer of
// the summed squared distance over a member set.

struct HybridMetric {
  using Item = HybridTransform;
  BarycenterOptions options;
  double distance_sq(const Item& a, const Item& b) const { return hybrid_distance_sq(a, b).total_sq; }
  Item barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const;
};

struct GaussianMetric {
  using Item = GaussianSummary;
  BarycenterOptions options;
  double distance_sq(const Item& a, const Item& b) const { return gaussian_wasserstein_sq(a, b); }
  Item barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const;
};

/// ||a - b||^2 / scale; the barycenter is the coordinate mean.
struct VectorMetric {
  using Item = Vector;
  double scale = 1.0;
  double distance_sq(const Item& a, const Item& b) const { return (a - b).squaredNorm() / scale; }
  Item barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const;
};

struct MarginalMetric {
  using Item = MarginalSummary;
  BarycenterOptions options;
  double distance_sq(const Item& a, const Item& b) const { return marginal_distance_sq(a, b); }
  Item barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const;
};

struct TransformedMetric {
  using Item = TransformedSummary;
  BarycenterOptions options;
  double distance_sq(const Item& a, const Item& b) const { return transformed_distance_sq(a, b); }
  Item barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const;
};

/// Items are indices into a distance matrix; centroids are medoids.
struct MedoidMetric {
  using Item = std::size_t;
  const DistanceMatrix* distances = nullptr;
  double distance_sq(Item a, Item b) const {
    return distances->squared(static_cast<Index>(a), static_cast<Index>(b));
  }
  Item barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const;
};

/// One Lloyd run from the given centroids: assign (ties to the lowest centroid
/// index), repair empty clusters with the point farthest from its centroid,
/// recompute barycenters. Stops right after an assignment step once labels
/// repeat, the relative cost improvement drops below 1e-8, or max_iter steps
/// ran.
template <class Metric>
ClusterResult<typename Metric::Item> lloyd_from(const Metric& metric, std::span<const typename Metric::Item> items,
                                                std::vector<typename Metric::Item> centroids, std::size_t max_iter);

/// Best of options.restarts k-means++ seeded Lloyd runs (restart r uses
/// derive_seed(seed, r)); ties keep the lowest restart.
template <class Metric>
ClusterResult<typename Metric::Item> lloyd_kmeans(const Metric& metric, std::span<const typename Metric::Item> items,
                                                  const KMeansOptions& options);

ClusterResult<HybridTransform> kmeans_hybrid(std::span<const HybridTransform> transforms,
                                             const KMeansOptions& options);
ClusterResult<GaussianSummary> kmeans_gaussian(std::span<const GaussianSummary> summaries,
                                               const KMeansOptions& options);
/// Classical MDS of D into `dim` coordinates, then Euclidean k-means.
ClusterResult<Vector> kmeans_euclidean_mds(const DistanceMatrix& distances, std::size_t dim,
                                           const KMeansOptions& options);

/// Quantile functions of 1D samples on the trimmed midpoint grid; one vector per dataset.
std::vector<Vector> quantile_profiles_1d(std::span<const Dataset> datasets, double delta = 0.01,
                                         std::size_t grid_size = 512);

/// Trimmed 1D Wasserstein k-means; centroid quantile functions are member averages.
ClusterResult<Vector> kmeans_exact_1d(std::span<const Dataset> datasets, const KMeansOptions& options,
                                      double delta = 0.01, std::size_t grid_size = 512);
ClusterResult<MarginalSummary> kmeans_marginal(std::span<const MarginalSummary> summaries,
                                               const KMeansOptions& options);
ClusterResult<TransformedSummary> kmeans_transformed(std::span<const TransformedSummary> summaries,
                                                     const KMeansOptions& options);
/// k-medoids over squared entries of D (energy distances are used as squared distances).
ClusterResult<std::size_t> kmeans_medoids(const DistanceMatrix& distances, const KMeansOptions& options);

struct Merge {
  std::size_t left;   // node ids: leaves 0..N-1, merge t creates node N+t
  std::size_t right;
  double height;      // hybrid distance between the merged nodes
  std::size_t size;   // total sample size of the new node
};

struct MergeTree {
  std::size_t leaves = 0;
  std::vector<Merge> merges;

  /// Labels after the first N - clusters merges, numbered by lowest member.
  std::vector<std::size_t> cut(std::size_t clusters) const;
};

/// Repeatedly merges the closest pair of current nodes and replaces it with
/// their hybrid barycenter under weights proportional to sample sizes.
MergeTree hierarchical_single_linkage(std::span<const HybridTransform> transforms, std::span<const std::size_t> sizes,
                                      const BarycenterOptions& options = {}, unsigned threads = 1);

struct ModeSeekResult {
  std::vector<std::size_t> labels;  // numbered by ascending mode index
  std::vector<std::size_t> modes;   // mode reached by each point
  std::vector<double> density;      // 1 / (distance to the r-th nearest other)
  std::size_t clusters = 0;
  std::size_t iterations = 0;       // longest path length to a mode
};

/// Each point moves to the densest member of itself plus its r nearest others
/// (density ties go to the lower index) until it stops. 1 <= r < N.
ModeSeekResult medoid_shift(const DistanceMatrix& distances, std::size_t r, std::size_t max_iter = 100);

/// Mean-shift analogue: each point is replaced by the equal-weight hybrid
/// barycenter of its r nearest transforms (itself included) until the
/// neighbor set repeats; points whose final neighbor sets overlap, directly or
/// through other points, share a cluster.
ModeSeekResult barycenter_shift(std::span<const HybridTransform> transforms, std::size_t r,
                                std::size_t max_iter = 100, const BarycenterOptions& options = {});

struct ElbowPoint {
  std::size_t k;
  double within_cost;
  double inverse;  // 1 / S_k (infinite when S_k is 0)
};

/// S_k for k = 1..k_max. Each k keeps the best of the restarts and a warm
/// start from the k-1 solution plus its farthest point, so S_k never increases.
template <class Metric>
std::vector<ElbowPoint> elbow_curve(const Metric& metric, std::span<const typename Metric::Item> items,
                                    std::size_t k_max, const KMeansOptions& options);

/// k with the largest relative decrease (S_{k-1} - S_k) / S_{k-1}, k >= 2.
std::size_t elbow_location(std::span<const ElbowPoint> curve);

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace hwd

#include "hwd/lloyd_impl.hpp"
