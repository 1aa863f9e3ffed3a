#pragma once

// Classical multidimensional scaling of a distance matrix.

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hwd/distance_matrix.hpp"

namespace hwd {

struct Embedding {
  Matrix coords;           // N x a
  Vector eigenvalues;      // top a, nonincreasing, clamped at 0
  double negative_mass = 0.0;  // sum of |negative eigenvalues| of the centered Gram matrix
};

/// Torgerson scaling: top-a eigenpairs of -J D^2 J / 2, coordinates scaled by
/// the square roots of the clamped eigenvalues. Requires 1 <= a <= N - 1
/// (a single point maps to the origin). Each coordinate column is oriented so
/// its largest-magnitude entry is positive.
Embedding classical_mds(const DistanceMatrix& distances, std::size_t a);

/// CSV with header id,x,y,cluster_label (the second coordinate is 0 when a = 1).
void write_coordinates_csv(std::ostream& out, std::span<const std::string> ids, const Embedding& embedding,
                           std::span<const std::size_t> labels);

}  // namespace hwd
