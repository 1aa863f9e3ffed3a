#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hwd/error.hpp"
#include "hwd/pretest.hpp"
#include "test_util.hpp"

using namespace hwd;
using hwd::test::normal_dataset;

namespace {

// Distribution of cross pairs over all perfect matchings of n_first A's and the rest B's.
std::vector<double> enumerate_crossmatch(std::size_t n_first, std::size_t n_total) {
  std::vector<double> counts(n_total / 2 + 1, 0.0);
  std::vector<char> used(n_total, 0);
  double total = 0.0;
  std::function<void(std::size_t)> rec = [&](std::size_t cross) {
    std::size_t i = 0;
    while (i < n_total && used[i]) ++i;
    if (i == n_total) {
      counts[cross] += 1.0;
      total += 1.0;
      return;
    }
    used[i] = 1;
    for (std::size_t j = i + 1; j < n_total; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      rec(cross + ((i < n_first) != (j < n_first) ? 1 : 0));
      used[j] = 0;
    }
    used[i] = 0;
  };
  rec(0);
  for (auto& c : counts) c /= total;
  return counts;
}

double rejection_rate(PretestMethod method, double shift, std::size_t trials, Index n, std::uint64_t seed,
                      std::size_t permutations = 499) {
  PretestOptions o;
  o.method = method;
  o.permutations = permutations;
  std::size_t rejects = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const auto a = normal_dataset(n, 1, rng), b = normal_dataset(n, 1, rng, shift);
    rejects += pretest(a, b, derive_seed(seed + 1, t), o).reject;
  }
  return static_cast<double>(rejects) / static_cast<double>(trials);
}

}  // namespace

TEST_CASE("parse and print methods") {
  CHECK(parse_pretest_method("energy") == PretestMethod::energy_permutation);
  CHECK(parse_pretest_method("crossmatch") == PretestMethod::crossmatch);
  CHECK_THROWS_AS(parse_pretest_method("ks"), Error);
  CHECK(parse_pretest_method(to_string(PretestMethod::crossmatch)) == PretestMethod::crossmatch);
}

TEST_CASE("crossmatch null distribution") {
  // Two A's and two B's: {AA, BB} once, two matchings with two cross pairs.
  CHECK(crossmatch_pmf(2, 4, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(crossmatch_pmf(2, 4, 1) == 0.0);
  CHECK(crossmatch_pmf(2, 4, 2) == doctest::Approx(2.0 / 3.0));
  for (std::size_t n_total : {4, 6, 8, 10}) {
    for (std::size_t n_first = 1; n_first < n_total; ++n_first) {
      const auto oracle = enumerate_crossmatch(n_first, n_total);
      double sum = 0.0;
      for (std::size_t a1 = 0; a1 < oracle.size(); ++a1) {
        CHECK(crossmatch_pmf(n_first, n_total, a1) == doctest::Approx(oracle[a1]).epsilon(1e-12));
        sum += oracle[a1];
        CHECK(crossmatch_cdf(n_first, n_total, a1) == doctest::Approx(sum).epsilon(1e-12));
      }
    }
  }
  double total = 0.0;
  for (std::size_t a1 = 0; a1 <= 100; ++a1) total += crossmatch_pmf(100, 200, a1);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("identical samples are not rejected") {
  Rng rng(91);
  const auto a = normal_dataset(30, 2, rng);
  const auto out = pretest(a, a, 5);
  CHECK(out.statistic == 0.0);
  CHECK(out.p_value >= 0.10);
  CHECK_FALSE(out.reject);
}

TEST_CASE("alpha bounds") {
  Rng rng(92);
  const auto a = normal_dataset(20, 1, rng), b = normal_dataset(20, 1, rng);
  for (double bad : {0.0, -0.1, 1.5}) {
    PretestOptions o;
    o.alpha = bad;
    try {
      pretest(a, b, 1, o);
      FAIL("expected InvalidParam");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidParam);
    }
  }
  PretestOptions one;
  one.alpha = 1.0;
  for (auto m : {PretestMethod::energy_permutation, PretestMethod::crossmatch}) {
    one.method = m;
    CHECK(pretest(a, a, 1, one).reject);
  }
}

TEST_CASE("odd pooled size for crossmatch") {
  Rng rng(93);
  const auto a = normal_dataset(11, 2, rng), b = normal_dataset(10, 2, rng);
  PretestOptions o;
  o.method = PretestMethod::crossmatch;
  const auto x = pretest(a, b, 4, o), y = pretest(a, b, 4, o);
  CHECK(x.p_value == y.p_value);
  CHECK(x.statistic <= 10.0);
}

TEST_CASE("level and power") {
  CHECK(rejection_rate(PretestMethod::energy_permutation, 0.0, 300, 30, 94, 199) <= 0.13);
  CHECK(rejection_rate(PretestMethod::crossmatch, 0.0, 300, 30, 95) <= 0.13);
  CHECK(rejection_rate(PretestMethod::energy_permutation, 3.0, 40, 100, 96, 199) >= 0.95);
  CHECK(rejection_rate(PretestMethod::crossmatch, 3.0, 40, 100, 97) >= 0.95);
}

TEST_CASE("energy permutation p-values are super-uniform") {
  PretestOptions o;
  o.permutations = 99;
  std::vector<double> p;
  for (std::size_t t = 0; t < 500; ++t) {
    Rng rng(derive_seed(98, t));
    const auto a = normal_dataset(15, 1, rng), b = normal_dataset(15, 1, rng);
    p.push_back(pretest(a, b, derive_seed(99, t), o).p_value);
  }
  std::sort(p.begin(), p.end());
  double excess = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    // Empirical CDF just at p[i] minus the uniform CDF.
    excess = std::max(excess, static_cast<double>(i + 1) / static_cast<double>(p.size()) - p[i]);
  }
  CHECK(excess <= 0.08);
}

TEST_CASE("transform_with_pretest") {
  Rng rng(100);
  std::vector<Dataset> data;
  for (int j = 0; j < 4; ++j) data.push_back(normal_dataset(100, 2, rng));
  const auto model = fit_hybrid(data, 3, {50});
  PretestOptions always;
  always.alpha = 1.0;
  PretestOutcome out;
  const auto full = transform_with_pretest(model.standardized[0], model.reference, 3, always, {50}, &out);
  CHECK(out.reject);
  CHECK_FALSE(full.shape_skipped);

  PretestOptions usual;
  std::size_t skipped = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto t = transform_with_pretest(model.standardized[j], model.reference, derive_seed(3, j), usual, {50});
    if (t.shape_skipped) {
      ++skipped;
      CHECK(t.shape == model.reference.anchors);
    }
  }
  CHECK(skipped >= 2);
}

TEST_CASE("fit_hybrid_pretested counts skips") {
  Rng rng(101);
  std::vector<Dataset> data;
  for (int j = 0; j < 6; ++j) data.push_back(normal_dataset(60, 1, rng, j));
  PretestOptions o;
  const auto a = fit_hybrid_pretested(data, 4, o, {30}), b = fit_hybrid_pretested(data, 4, o, {30}, 3);
  std::size_t skipped = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    skipped += a.model.transforms[j].shape_skipped;
    CHECK(a.model.transforms[j].shape_skipped == !a.outcomes[j].reject);
    CHECK(a.model.transforms[j].shape == b.model.transforms[j].shape);
  }
  CHECK(skipped == a.skipped);
}
