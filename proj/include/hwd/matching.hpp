#pragma once

// Weighted matching on general (non-bipartite) graphs.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hwd/matgauss.hpp"

namespace hwd {

struct WeightedEdge {
  std::size_t u;
  std::size_t v;
  std::int64_t weight;
};

/// Maximum-weight matching by Edmonds' blossom algorithm with dual variables
/// (Galil's O(n^3) formulation). With `max_cardinality` only matchings of
/// maximum size are considered. Integer weights keep every dual update exact.
/// Returns mate[v] (or -1 when v is unmatched) for v in [0, vertex_count).
std::vector<std::ptrdiff_t> max_weight_matching(std::size_t vertex_count, const std::vector<WeightedEdge>& edges,
                                                bool max_cardinality);

/// Minimum-total-distance perfect matching of the complete graph on an even
/// number of points, given their symmetric distance matrix. Distances are
/// quantized to 2^-30 of the largest one before matching.
std::vector<std::size_t> min_weight_perfect_matching(const Matrix& distances);

}  // namespace hwd
