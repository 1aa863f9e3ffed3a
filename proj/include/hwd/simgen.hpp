#pragma once

// Seeded generators for the simulated collections used in the examples and
// acceptance runs.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hwd/transport.hpp"

namespace hwd {

struct ScenarioSpec {
  std::string name;
  std::size_t n_per_dataset = 0;  // 0: scenario default
  std::size_t per_group = 0;      // datasets per group, 0: scenario default
  std::uint64_t seed = 0;
  std::vector<double> group_means;      // ex1_1d_gauss3 group means (default 0, 2, 4)
  std::vector<double> mixture_offsets;  // ex3_1d_mixtures component offsets a_g (default 0, 3, 2.5)
  std::vector<double> mixture_weights;  // ex3_1d_mixtures weights w_g (default 0.5, 0.5, 0.8; 0.5 each with custom offsets)
};

struct Scenario {
  std::vector<Dataset> datasets;
  std::vector<std::size_t> labels;
};

/// Names accepted by generate().
const std::vector<std::string>& scenario_names();

/// Dataset j is drawn from its own stream derive_seed(seed, j).
///
/// ex1_1d_gauss3: 3 groups of 5, N(mu_g, 1), n = 100.
/// ex2_1d_gauss_vs_twopoint: 20 N(0, 1) and 20 samples of (d_-1 + d_1)/2, n = 100.
/// ex3_1d_mixtures: 3 groups of 10, w_g N(-a_g, 1) + (1 - w_g) N(a_g, 1)
///   standardized to mean 0 and variance 1 (a Normal, a symmetric bimodal and
///   a skewed mixture by default), n = 100.
/// biv1_gauss_gauss_unif: 20 N(0, I), 20 N((5, 5), I), 20 uniform on [0, 1]^2, n = 100.
/// biv2_circles4: 4 groups of 10 uniform-on-circle samples; group g has radius
///   in [0.5 + g, 1 + g] and center within 1 of its own corner (+-8, +-8), n = 100.
/// biv3_gauss_vs_circle: 50 circles of radius sqrt(2) around 0 and 50 N(0, I), n = 100.
/// medoid4_gauss: 4 groups of 20 bivariate Gaussians around corners of a
///   square of side 8, each dataset mean jittered by N(0, 1.2^2 I), n = 100.
/// marginal_normal_circle: 50 N(0, I) and 50 circles of radius sqrt(2), n = 100.
/// transformed_normal_rademacher: 50 N(0, 1) and 50 samples of (d_-1 + d_1)/2, n = 1000.
Scenario generate(const ScenarioSpec& spec);

}  // namespace hwd
