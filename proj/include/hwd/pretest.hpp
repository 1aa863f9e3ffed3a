#pragma once

// Two-sample tests used to decide whether a dataset's shape block is needed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hwd/hybrid.hpp"

namespace hwd {

enum class PretestMethod { energy_permutation, crossmatch };

std::string_view to_string(PretestMethod method);
PretestMethod parse_pretest_method(std::string_view name);

struct PretestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;  // p_value <= alpha
  PretestMethod method = PretestMethod::energy_permutation;
};

struct PretestOptions {
  double alpha = 0.10;
  PretestMethod method = PretestMethod::energy_permutation;
  std::size_t permutations = 499;
};

/// Energy permutation test: the energy statistic with B random relabelings,
/// p = (1 + #{perm >= observed}) / (B + 1).
/// Cross-match test: minimum-distance perfect matching of the pooled sample;
/// the statistic is the number of cross pairs and p = P(A1 <= observed) under
/// the exact null. An odd pooled size drops one seeded random point.
/// alpha must lie in (0, 1]; alpha = 1 always rejects.
PretestOutcome pretest(const Dataset& a, const Dataset& b, std::uint64_t seed, const PretestOptions& options = {});

/// P(A1 = a1) for a1 cross pairs among N = n + (N - n) points matched into
/// N/2 pairs, n of them from the first sample.
double crossmatch_pmf(std::size_t n_first, std::size_t n_total, std::size_t a1);
double crossmatch_cdf(std::size_t n_first, std::size_t n_total, std::size_t a1);

/// Tests the standardized subsample used by the transport estimate against a
/// fresh m-point draw from the reference. Without a rejection the shape block
/// is the anchors themselves (identity map); otherwise the full estimate.
HybridTransform transform_with_pretest(const StandardizedDataset& xt, const ReferenceMeasure& ref, std::uint64_t seed,
                                       const PretestOptions& pretest_options, const HybridOptions& options = {},
                                       PretestOutcome* outcome = nullptr);

struct PretestedModel {
  HybridModel model;
  std::vector<PretestOutcome> outcomes;
  std::size_t skipped = 0;
};

PretestedModel fit_hybrid_pretested(std::span<const Dataset> datasets, std::uint64_t seed,
                                    const PretestOptions& pretest_options, const HybridOptions& options = {},
                                    unsigned threads = 1);

}  // namespace hwd
