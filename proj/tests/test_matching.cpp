#include <doctest.h>

#include <algorithm>
#include <functional>
#include <vector>

#include "hwd/error.hpp"
#include "hwd/matching.hpp"
#include "test_util.hpp"

using namespace hwd;

namespace {

struct Best {
  std::int64_t weight = 0;
  std::size_t size = 0;
};

// Exhaustive search over all matchings; prefers larger size first when `max_cardinality`.
Best brute_force(std::size_t n, const std::vector<WeightedEdge>& edges, bool max_cardinality) {
  Best best;
  std::vector<char> used(n, 0);
  std::function<void(std::size_t, std::int64_t, std::size_t)> rec = [&](std::size_t k, std::int64_t w, std::size_t size) {
    if (k == edges.size()) {
      const bool better = max_cardinality ? (size > best.size || (size == best.size && w > best.weight)) : w > best.weight;
      if (better) best = {w, size};
      return;
    }
    rec(k + 1, w, size);
    const auto& e = edges[k];
    if (!used[e.u] && !used[e.v]) {
      used[e.u] = used[e.v] = 1;
      rec(k + 1, w + e.weight, size + 1);
      used[e.u] = used[e.v] = 0;
    }
  };
  rec(0, 0, 0);
  return best;
}

Best evaluate(const std::vector<std::ptrdiff_t>& mate, const std::vector<WeightedEdge>& edges) {
  Best b;
  for (std::size_t v = 0; v < mate.size(); ++v) {
    if (mate[v] >= 0) REQUIRE(mate[static_cast<std::size_t>(mate[v])] == static_cast<std::ptrdiff_t>(v));
  }
  for (const auto& e : edges) {
    if (mate[e.u] == static_cast<std::ptrdiff_t>(e.v)) {
      b.weight += e.weight;
      ++b.size;
    }
  }
  return b;
}

double brute_force_perfect(const Matrix& d) {
  const auto n = static_cast<std::size_t>(d.rows());
  std::vector<char> used(n, 0);
  double best = INFINITY;
  std::function<void(double)> rec = [&](double cost) {
    std::size_t i = 0;
    while (i < n && used[i]) ++i;
    if (i == n) {
      best = std::min(best, cost);
      return;
    }
    used[i] = 1;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      rec(cost + d(static_cast<Index>(i), static_cast<Index>(j)));
      used[j] = 0;
    }
    used[i] = 0;
  };
  rec(0.0);
  return best;
}

}  // namespace

TEST_CASE("small hand-checked matchings") {
  CHECK(max_weight_matching(0, {}, false).empty());
  CHECK(max_weight_matching(2, {{0, 1, 1}}, false) == std::vector<std::ptrdiff_t>{1, 0});
  // Path 0-1-2-3 with a heavy middle edge.
  const std::vector<WeightedEdge> path{{0, 1, 5}, {1, 2, 11}, {2, 3, 5}};
  CHECK(max_weight_matching(4, path, false) == std::vector<std::ptrdiff_t>{-1, 2, 1, -1});
  CHECK(max_weight_matching(4, path, true) == std::vector<std::ptrdiff_t>{1, 0, 3, 2});
  // Negative weights are never taken without the cardinality requirement.
  CHECK(max_weight_matching(2, {{0, 1, -2}}, false) == std::vector<std::ptrdiff_t>{-1, -1});
}

TEST_CASE("blossom cases") {
  // Odd cycle forcing a blossom, then augmenting through it.
  const std::vector<WeightedEdge> e1{{0, 1, 8}, {0, 2, 9}, {1, 2, 10}, {2, 3, 7}};
  CHECK(max_weight_matching(4, e1, false) == std::vector<std::ptrdiff_t>{1, 0, 3, 2});
  const std::vector<WeightedEdge> e2{{0, 1, 8}, {0, 2, 9}, {1, 2, 10}, {2, 3, 7}, {0, 5, 5}, {3, 4, 6}};
  CHECK(max_weight_matching(6, e2, false) == std::vector<std::ptrdiff_t>{5, 2, 1, 4, 3, 0});
}

TEST_CASE("max_weight_matching agrees with exhaustive search") {
  Rng rng(81);
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<WeightedEdge> edges;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (rng.uniform() < 0.6) edges.push_back({u, v, static_cast<std::int64_t>(rng.below(20)) - (t % 3 == 0 ? 5 : 0)});
      }
    }
    for (bool card : {false, true}) {
      const auto mate = max_weight_matching(n, edges, card);
      const auto got = evaluate(mate, edges);
      const auto want = brute_force(n, edges, card);
      CHECK(got.weight == want.weight);
      if (card) CHECK(got.size == want.size);
    }
  }
}

TEST_CASE("min_weight_perfect_matching agrees with exhaustive search") {
  Rng rng(82);
  for (int t = 0; t < 150; ++t) {
    const Index n = 2 * (1 + static_cast<Index>(rng.below(5)));
    const Matrix pts = hwd::test::normal_matrix(n, 2, rng);
    const Matrix d = squared_distances(pts, pts).cwiseMax(0.0).cwiseSqrt();
    const auto mate = min_weight_perfect_matching(d);
    double cost = 0.0;
    for (Index i = 0; i < n; ++i) {
      const auto j = static_cast<Index>(mate[static_cast<std::size_t>(i)]);
      REQUIRE(j != i);
      REQUIRE(mate[static_cast<std::size_t>(j)] == static_cast<std::size_t>(i));
      if (i < j) cost += d(i, j);
    }
    CHECK(cost == doctest::Approx(brute_force_perfect(d)).epsilon(1e-7));
  }
}

TEST_CASE("min_weight_perfect_matching errors") {
  auto kind = [](const Matrix& m) {
    try {
      min_weight_perfect_matching(m);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind(Matrix::Zero(3, 3)) == ErrorKind::SizeError);
  CHECK(kind(Matrix::Zero(2, 4)) == ErrorKind::DimensionError);
  Matrix bad = Matrix::Ones(2, 2);
  bad(0, 1) = INFINITY;
  CHECK(kind(bad) == ErrorKind::InvalidCost);
}
