#pragma once

// Seedable, splittable random number generation.
//
// The generator is xoshiro256** (Blackman & Vigna) with its 256-bit state
// filled from a SplitMix64 stream started at the user seed. Child streams are
// derived with derive_seed(parent, stream) = SplitMix64 mixing, so a parallel
// schedule can hand every work item its own generator without changing results.
// Uniform, integer and normal variates are produced by the code in this file
// rather than <random> distributions, whose output is implementation-defined.
// This algorithm set is part of the reproducibility contract of the CLI.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace hwd {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for an independent child stream of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Standard normal (Marsaglia polar method).
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// m distinct indices drawn uniformly from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, Rng& rng);

/// Fisher-Yates shuffle, portable across standard libraries.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace hwd
