#include "hwd/cluster.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "hwd/analyze.hpp"

namespace hwd {

namespace {

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

template <class T>
std::vector<T> gather(std::span<const T> items, const std::vector<std::size_t>& members) {
  std::vector<T> out;
  out.reserve(members.size());
  for (auto i : members) out.push_back(items[i]);
  return out;
}

void check_members(const std::vector<std::size_t>& members) {
  if (members.empty()) throw Error(ErrorKind::InvalidParam, "barycenter of an empty cluster");
}

template <class C>
ClusterResult<C> tagged(ClusterResult<C> r, ClusterMode mode) {
  r.mode = mode;
  return r;
}

// Lexicographic "denser than": smaller r-th neighbor distance, then lower index.
bool denser(const std::vector<double>& radius, std::size_t a, std::size_t b) {
  return radius[a] < radius[b] || (radius[a] == radius[b] && a < b);
}

std::vector<std::size_t> nearest_others(const DistanceMatrix& d, std::size_t i, std::size_t r) {
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < static_cast<std::size_t>(d.size()); ++j) {
    if (j != i) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d(static_cast<Index>(i), static_cast<Index>(a)) < d(static_cast<Index>(i), static_cast<Index>(b));
  });
  order.resize(r);
  return order;
}

std::vector<std::size_t> relabel_by_key(const std::vector<std::size_t>& keys) {
  std::map<std::size_t, std::size_t> ids;
  for (auto k : keys) ids.emplace(k, 0);
  std::size_t next = 0;
  for (auto& [key, id] : ids) id = next++;
  std::vector<std::size_t> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) out[i] = ids[keys[i]];
  return out;
}

}  // namespace

std::string_view to_string(ClusterMode mode) {
  switch (mode) {
    case ClusterMode::hybrid: return "hybrid";
    case ClusterMode::gaussian: return "gaussian";
    case ClusterMode::euclidean_mds: return "euclidean_mds";
    case ClusterMode::exact1d: return "exact1d";
    case ClusterMode::marginal: return "marginal";
    case ClusterMode::transformed: return "transformed";
    case ClusterMode::energy_medoid: return "energy_medoid";
  }
  return "unknown";
}

ClusterMode parse_cluster_mode(std::string_view name) {
  for (auto mode : {ClusterMode::hybrid, ClusterMode::gaussian, ClusterMode::euclidean_mds, ClusterMode::exact1d,
                    ClusterMode::marginal, ClusterMode::transformed, ClusterMode::energy_medoid}) {
    if (name == to_string(mode)) return mode;
  }
  if (name == "energy") return ClusterMode::energy_medoid;
  if (name == "mds") return ClusterMode::euclidean_mds;
  throw Error(ErrorKind::InvalidParam, "unknown clustering mode '" + std::string(name) + "'");
}

DistanceMatrix::DistanceMatrix(Matrix entries) : d_(std::move(entries)) {
  if (d_.rows() != d_.cols()) throw Error(ErrorKind::DimensionError, "distance matrix must be square");
  for (Index i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0) throw Error(ErrorKind::InvalidMatrix, "distance matrix diagonal must be zero");
    for (Index j = 0; j < d_.cols(); ++j) {
      if (!std::isfinite(d_(i, j)) || d_(i, j) < 0.0) {
        throw Error(ErrorKind::InvalidMatrix, "distances must be finite and nonnegative");
      }
      if (d_(i, j) != d_(j, i)) throw Error(ErrorKind::InvalidMatrix, "distance matrix must be symmetric");
    }
  }
}

DistanceMatrix pairwise_distances(std::size_t n, const std::function<double(std::size_t, std::size_t)>& dist_sq,
                                  unsigned threads) {
  Matrix d = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d(static_cast<Index>(i), static_cast<Index>(j)) = std::sqrt(std::max(0.0, dist_sq(i, j)));
    }
  });
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = i + 1; j < d.cols(); ++j) d(j, i) = d(i, j);
  }
  return DistanceMatrix(std::move(d));
}

std::vector<std::size_t> kmeanspp_seed(const std::function<double(std::size_t, std::size_t)>& dist_sq,
                                       std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidParam, "need 1 <= k <= N");
  Rng rng(seed);
  std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(n))};
  std::vector<char> taken(n, 0);
  taken[chosen[0]] = 1;
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = taken[i] ? 0.0 : dist_sq(i, chosen[0]);
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) total += nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || nearest[i] <= 0.0) continue;
        acc += nearest[i];
        pick = i;
        if (u < acc) break;
      }
    } else {
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) free.push_back(i);
      }
      pick = free[rng.below(free.size())];
    }
    chosen.push_back(pick);
    taken[pick] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = taken[i] ? 0.0 : std::min(nearest[i], dist_sq(i, pick));
    }
  }
  return chosen;
}

HybridTransform HybridMetric::barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const {
  check_members(members);
  const auto parts = gather(items, members);
  return hybrid_barycenter(parts, uniform_weights(parts.size()), options);
}

GaussianSummary GaussianMetric::barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const {
  check_members(members);
  const auto parts = gather(items, members);
  return gaussian_barycenter(parts, uniform_weights(parts.size()), options);
}

Vector VectorMetric::barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const {
  check_members(members);
  Vector out = Vector::Zero(items[members.front()].size());
  for (auto i : members) out += items[i];
  return out / static_cast<double>(members.size());
}

MarginalSummary MarginalMetric::barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const {
  check_members(members);
  const auto parts = gather(items, members);
  return marginal_barycenter(parts, uniform_weights(parts.size()), options);
}

TransformedSummary TransformedMetric::barycenter(std::span<const Item> items,
                                                 const std::vector<std::size_t>& members) const {
  check_members(members);
  const auto parts = gather(items, members);
  return transformed_barycenter(parts, uniform_weights(parts.size()), options);
}

std::size_t MedoidMetric::barycenter(std::span<const Item> items, const std::vector<std::size_t>& members) const {
  check_members(members);
  std::size_t best = items[members.front()];
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto c : members) {
    double cost = 0.0;
    for (auto j : members) cost += distance_sq(items[c], items[j]);
    if (cost < best_cost) best_cost = cost, best = items[c];
  }
  return best;
}

ClusterResult<HybridTransform> kmeans_hybrid(std::span<const HybridTransform> transforms,
                                             const KMeansOptions& options) {
  return tagged(lloyd_kmeans(HybridMetric{options.barycenter}, transforms, options), ClusterMode::hybrid);
}

ClusterResult<GaussianSummary> kmeans_gaussian(std::span<const GaussianSummary> summaries,
                                               const KMeansOptions& options) {
  return tagged(lloyd_kmeans(GaussianMetric{options.barycenter}, summaries, options), ClusterMode::gaussian);
}

ClusterResult<Vector> kmeans_euclidean_mds(const DistanceMatrix& distances, std::size_t dim,
                                           const KMeansOptions& options) {
  const Embedding e = classical_mds(distances, dim);
  std::vector<Vector> points;
  for (Index i = 0; i < e.coords.rows(); ++i) points.push_back(e.coords.row(i).transpose());
  return tagged(lloyd_kmeans(VectorMetric{}, std::span<const Vector>(points), options), ClusterMode::euclidean_mds);
}

std::vector<Vector> quantile_profiles_1d(std::span<const Dataset> datasets, double delta, std::size_t grid_size) {
  const auto grid = quantile_grid(delta, grid_size);
  std::vector<Vector> out;
  out.reserve(datasets.size());
  for (const auto& x : datasets) {
    if (x.dim() != 1) throw Error(ErrorKind::DimensionError, "exact mode needs one-dimensional datasets");
    const auto q = empirical_quantiles(sorted_copy(column_values(x.points, 0)), grid);
    out.push_back(Eigen::Map<const Vector>(q.data(), static_cast<Index>(q.size())));
  }
  return out;
}

ClusterResult<Vector> kmeans_exact_1d(std::span<const Dataset> datasets, const KMeansOptions& options, double delta,
                                      std::size_t grid_size) {
  const auto profiles = quantile_profiles_1d(datasets, delta, grid_size);
  return tagged(lloyd_kmeans(VectorMetric{static_cast<double>(grid_size)}, std::span<const Vector>(profiles), options),
                ClusterMode::exact1d);
}

ClusterResult<MarginalSummary> kmeans_marginal(std::span<const MarginalSummary> summaries,
                                               const KMeansOptions& options) {
  return tagged(lloyd_kmeans(MarginalMetric{options.barycenter}, summaries, options), ClusterMode::marginal);
}

ClusterResult<TransformedSummary> kmeans_transformed(std::span<const TransformedSummary> summaries,
                                                     const KMeansOptions& options) {
  return tagged(lloyd_kmeans(TransformedMetric{options.barycenter}, summaries, options), ClusterMode::transformed);
}

ClusterResult<std::size_t> kmeans_medoids(const DistanceMatrix& distances, const KMeansOptions& options) {
  std::vector<std::size_t> items(static_cast<std::size_t>(distances.size()));
  std::iota(items.begin(), items.end(), std::size_t{0});
  return tagged(lloyd_kmeans(MedoidMetric{&distances}, std::span<const std::size_t>(items), options),
                ClusterMode::energy_medoid);
}

std::vector<std::size_t> MergeTree::cut(std::size_t clusters) const {
  if (clusters < 1 || clusters > leaves) throw Error(ErrorKind::InvalidParam, "cluster count must be in [1, N]");
  std::vector<std::size_t> parent(leaves + merges.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const std::size_t applied = leaves - clusters;
  for (std::size_t t = 0; t < applied; ++t) {
    parent[merges[t].left] = leaves + t;
    parent[merges[t].right] = leaves + t;
  }
  std::vector<std::size_t> roots(leaves);
  for (std::size_t i = 0; i < leaves; ++i) {
    std::size_t r = i;
    while (parent[r] != r) r = parent[r];
    roots[i] = r;
  }
  // Number clusters by their lowest leaf.
  std::map<std::size_t, std::size_t> first;
  for (std::size_t i = 0; i < leaves; ++i) first.emplace(roots[i], first.size());
  std::vector<std::size_t> labels(leaves);
  for (std::size_t i = 0; i < leaves; ++i) labels[i] = first[roots[i]];
  return labels;
}

MergeTree hierarchical_single_linkage(std::span<const HybridTransform> transforms, std::span<const std::size_t> sizes,
                                      const BarycenterOptions& options, unsigned threads) {
  const std::size_t n = transforms.size();
  if (n < 2) throw Error(ErrorKind::InvalidParam, "need at least two transforms");
  if (sizes.size() != n) throw Error(ErrorKind::SizeError, "one sample size per transform");
  std::vector<HybridTransform> nodes(transforms.begin(), transforms.end());
  std::vector<std::size_t> node_size(sizes.begin(), sizes.end());
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  const std::size_t total = 2 * n - 1;
  Matrix d2 = Matrix::Zero(static_cast<Index>(total), static_cast<Index>(total));
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d2(static_cast<Index>(i), static_cast<Index>(j)) = hybrid_distance_sq(nodes[i], nodes[j]).total_sq;
    }
  });
  auto dist = [&](std::size_t a, std::size_t b) {
    return d2(static_cast<Index>(std::min(a, b)), static_cast<Index>(std::max(a, b)));
  };
  MergeTree tree;
  tree.leaves = n;
  while (active.size() > 1) {
    std::size_t ba = 0, bb = 1;
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        if (dist(active[x], active[y]) < dist(active[ba], active[bb])) ba = x, bb = y;
      }
    }
    const std::size_t left = active[ba], right = active[bb];
    const std::size_t merged_size = node_size[left] + node_size[right];
    const double w = static_cast<double>(node_size[left]) / static_cast<double>(merged_size);
    const std::vector<HybridTransform> pair{nodes[left], nodes[right]};
    const std::vector<double> weights{w, 1.0 - w};
    const std::size_t id = nodes.size();
    tree.merges.push_back({left, right, std::sqrt(std::max(0.0, dist(left, right))), merged_size});
    nodes.push_back(hybrid_barycenter(pair, weights, options));
    node_size.push_back(merged_size);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bb));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(ba));
    std::vector<double> fresh(active.size());
    parallel_for(active.size(), threads,
                 [&](std::size_t x) { fresh[x] = hybrid_distance_sq(nodes[active[x]], nodes[id]).total_sq; });
    for (std::size_t x = 0; x < active.size(); ++x) d2(static_cast<Index>(active[x]), static_cast<Index>(id)) = fresh[x];
    active.push_back(id);
  }
  return tree;
}

ModeSeekResult medoid_shift(const DistanceMatrix& distances, std::size_t r, std::size_t max_iter) {
  const auto n = static_cast<std::size_t>(distances.size());
  if (r < 1 || r >= n) throw Error(ErrorKind::InvalidParam, "need 1 <= r < N");
  std::vector<std::vector<std::size_t>> neighbors(n);
  ModeSeekResult out;
  out.density.resize(n);
  std::vector<double> radius(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i] = nearest_others(distances, i, r);
    radius[i] = distances(static_cast<Index>(i), static_cast<Index>(neighbors[i].back()));
    out.density[i] = radius[i] > 0.0 ? 1.0 / radius[i] : std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> step(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = i;
    for (auto j : neighbors[i]) {
      if (denser(radius, j, best)) best = j;
    }
    step[i] = best;
  }
  out.modes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t at = i, moves = 0;
    while (step[at] != at && moves < max_iter) at = step[at], ++moves;
    out.modes[i] = at;
    out.iterations = std::max(out.iterations, moves);
  }
  out.labels = relabel_by_key(out.modes);
  out.clusters = *std::max_element(out.labels.begin(), out.labels.end()) + 1;
  return out;
}

ModeSeekResult barycenter_shift(std::span<const HybridTransform> transforms, std::size_t r, std::size_t max_iter,
                                const BarycenterOptions& options) {
  const std::size_t n = transforms.size();
  if (r < 1 || r > n) throw Error(ErrorKind::InvalidParam, "need 1 <= r <= N");
  auto nearest_set = [&](const HybridTransform& p) {
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = {hybrid_distance_sq(p, transforms[j]).total_sq, j};
    std::stable_sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::size_t> set(r);
    for (std::size_t i = 0; i < r; ++i) set[i] = d[i].second;
    std::sort(set.begin(), set.end());
    return set;
  };
  ModeSeekResult out;
  std::vector<std::vector<std::size_t>> final_sets(n);
  out.modes.resize(n);
  out.density.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    HybridTransform p = transforms[i];
    std::vector<std::size_t> set = nearest_set(p), last;
    std::size_t moves = 0;
    while (set != last && moves < max_iter) {
      last = set;
      const auto parts = gather(transforms, set);
      p = hybrid_barycenter(parts, uniform_weights(parts.size()), options);
      set = nearest_set(p);
      ++moves;
    }
    final_sets[i] = set;
    out.iterations = std::max(out.iterations, moves);
  }
  // Points whose final neighbor sets overlap share a mode, the lowest index reached.
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : final_sets[i]) {
      const std::size_t a = find(i), b = find(j);
      if (a != b) root[std::max(a, b)] = std::min(a, b);
    }
  }
  std::set<std::size_t> distinct;
  for (std::size_t i = 0; i < n; ++i) distinct.insert(out.modes[i] = find(i));
  out.labels = relabel_by_key(out.modes);
  out.clusters = distinct.size();
  return out;
}

std::size_t elbow_location(std::span<const ElbowPoint> curve) {
  if (curve.size() < 2) throw Error(ErrorKind::InvalidParam, "elbow needs at least two values of k");
  std::size_t best = curve[1].k;
  double best_drop = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double prev = curve[i - 1].within_cost;
    const double drop = prev > 0.0 ? (prev - curve[i].within_cost) / prev : 0.0;
    if (drop > best_drop) best_drop = drop, best = curve[i].k;
  }
  return best;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::SizeError, "labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : table) index += pairs(c);
  for (const auto& [key, c] : rows) sum_a += pairs(c);
  for (const auto& [key, c] : cols) sum_b += pairs(c);
  const double expected = sum_a * sum_b / pairs(static_cast<double>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace hwd
