#pragma once

// Template definitions for cluster.hpp.

#include <algorithm>
#include <cmath>
#include <limits>

#include "hwd/error.hpp"
#include "hwd/parallel.hpp"
#include "hwd/rng.hpp"

namespace hwd {

namespace detail {

template <class Metric>
double assign(const Metric& metric, std::span<const typename Metric::Item> items,
              const std::vector<typename Metric::Item>& centroids, std::vector<std::size_t>& labels,
              std::vector<double>& costs) {
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = metric.distance_sq(items[i], centroids[c]);
      if (d < best) best = d, arg = c;
    }
    labels[i] = arg;
    costs[i] = best;
    total += best;
  }
  return total;
}

// Moves the farthest point of a non-singleton cluster into each empty cluster.
template <class Metric>
bool repair_empty(std::span<const typename Metric::Item> items, std::vector<typename Metric::Item>& centroids,
                  std::vector<std::size_t>& labels, std::vector<double>& costs) {
  bool repaired = false;
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (auto l : labels) ++counts[l];
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] > 0) continue;
    std::size_t arg = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      if (arg == items.size() || costs[i] > costs[arg]) arg = i;
    }
    if (arg == items.size()) throw Error(ErrorKind::InvalidParam, "cannot fill an empty cluster");
    --counts[labels[arg]];
    labels[arg] = c;
    ++counts[c];
    costs[arg] = 0.0;
    centroids[c] = items[arg];
    repaired = true;
  }
  return repaired;
}

inline double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace detail

template <class Metric>
ClusterResult<typename Metric::Item> lloyd_from(const Metric& metric, std::span<const typename Metric::Item> items,
                                                std::vector<typename Metric::Item> centroids, std::size_t max_iter) {
  using Item = typename Metric::Item;
  if (centroids.empty() || centroids.size() > items.size()) {
    throw Error(ErrorKind::InvalidParam, "need 1 <= k <= N");
  }
  if (max_iter < 1) throw Error(ErrorKind::InvalidParam, "max_iter must be positive");
  const std::size_t n = items.size(), k = centroids.size();
  ClusterResult<Item> best;
  std::vector<std::size_t> labels(n, k), previous;
  std::vector<double> costs(n, 0.0);
  for (std::size_t iter = 1;; ++iter) {
    previous = labels;
    detail::assign(metric, items, centroids, labels, costs);
    const bool repaired = detail::repair_empty<Metric>(items, centroids, labels, costs);
    const double cost = detail::sum_of(costs);
    if (!best.cost_trace.empty() && cost > best.within_cost) {
      // Barycenters are solved iteratively; never accept a worse state.
      break;
    }
    const double last = best.cost_trace.empty() ? std::numeric_limits<double>::infinity() : best.within_cost;
    best.labels = labels;
    best.centroids = centroids;
    best.within_cost = cost;
    best.iterations = iter;
    best.cost_trace.push_back(cost);
    const bool stable = !repaired && labels == previous;
    const bool flat = !repaired && std::isfinite(last) && last - cost <= 1e-8 * std::max(last, 1e-300);
    if (stable || flat || iter >= max_iter) break;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == c) members.push_back(i);
      }
      centroids[c] = metric.barycenter(items, members);
    }
  }
  return best;
}

template <class Metric>
ClusterResult<typename Metric::Item> lloyd_kmeans(const Metric& metric, std::span<const typename Metric::Item> items,
                                                  const KMeansOptions& options) {
  using Item = typename Metric::Item;
  if (options.k < 1 || options.k > items.size()) throw Error(ErrorKind::InvalidParam, "need 1 <= k <= N");
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  std::vector<ClusterResult<Item>> runs(restarts);
  parallel_for(restarts, options.threads, [&](std::size_t r) {
    const auto seeds = kmeanspp_seed(
        [&](std::size_t i, std::size_t j) { return metric.distance_sq(items[i], items[j]); }, items.size(), options.k,
        derive_seed(options.seed, r));
    std::vector<Item> centroids;
    centroids.reserve(seeds.size());
    for (auto s : seeds) centroids.push_back(items[s]);
    runs[r] = lloyd_from(metric, items, std::move(centroids), options.max_iter);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].within_cost < runs[best].within_cost) best = r;
  }
  return std::move(runs[best]);
}

template <class Metric>
std::vector<ElbowPoint> elbow_curve(const Metric& metric, std::span<const typename Metric::Item> items,
                                    std::size_t k_max, const KMeansOptions& options) {
  using Item = typename Metric::Item;
  if (k_max < 1 || k_max > items.size()) throw Error(ErrorKind::InvalidParam, "need 1 <= k_max <= N");
  std::vector<ElbowPoint> curve;
  ClusterResult<Item> previous;
  for (std::size_t k = 1; k <= k_max; ++k) {
    KMeansOptions opt = options;
    opt.k = k;
    opt.seed = derive_seed(options.seed, k);
    ClusterResult<Item> result = lloyd_kmeans(metric, items, opt);
    if (k > 1) {
      std::size_t far = 0;
      double far_cost = -1.0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        const double c = metric.distance_sq(items[i], previous.centroids[previous.labels[i]]);
        if (c > far_cost) far_cost = c, far = i;
      }
      auto centroids = previous.centroids;
      centroids.push_back(items[far]);
      auto warm = lloyd_from(metric, items, std::move(centroids), options.max_iter);
      if (warm.within_cost < result.within_cost) result = std::move(warm);
    }
    const double s = result.within_cost;
    curve.push_back({k, s, s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity()});
    previous = std::move(result);
  }
  return curve;
}

}  // namespace hwd
