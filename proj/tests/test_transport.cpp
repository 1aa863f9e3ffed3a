#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hwd/error.hpp"
#include "hwd/transport.hpp"
#include "test_util.hpp"

using namespace hwd;
using hwd::test::brute_force_assignment;
using hwd::test::column;

TEST_CASE("Dataset rejects empty and non-finite input") {
  CHECK_THROWS_AS(Dataset(Matrix(0, 2)), Error);
  Matrix bad = Matrix::Zero(2, 1);
  bad(1, 0) = NAN;
  try {
    Dataset d(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParam);
  }
}

TEST_CASE("hungarian examples") {
  Matrix one(1, 1);
  one << 3.5;
  const auto a = hungarian(one);
  CHECK(a.perm == std::vector<std::size_t>{0});
  CHECK(a.total == 3.5);

  Matrix two(2, 2);
  two << 0, 1, 1, 0;
  const auto b = hungarian(two);
  CHECK(b.perm == std::vector<std::size_t>{0, 1});
  CHECK(b.total == 0.0);

  Matrix rect(2, 3);
  try {
    hungarian(rect);
    FAIL("expected DimensionError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionError);
  }
  two(0, 1) = NAN;
  try {
    hungarian(two);
    FAIL("expected InvalidCost");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidCost);
  }
}

TEST_CASE("hungarian matches exhaustive search") {
  Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    const Index m = 1 + static_cast<Index>(t % 7);
    Matrix c(m, m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) c(i, j) = t % 2 ? static_cast<double>(rng.below(10)) : rng.uniform();
    }
    const auto a = hungarian(c);
    std::vector<std::size_t> seen = a.perm;
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) REQUIRE(seen[i] == i);
    double total = 0.0;
    for (Index i = 0; i < m; ++i) total += c(i, static_cast<Index>(a.perm[static_cast<std::size_t>(i)]));
    CHECK(a.total == doctest::Approx(total).epsilon(1e-12));
    CHECK(a.total == doctest::Approx(brute_force_assignment(c)).epsilon(1e-12));
  }
}

TEST_CASE("empirical_w2_sq examples") {
  Rng rng(22);
  const auto x = hwd::test::normal_dataset(20, 2, rng);
  CHECK(empirical_w2_sq(x, x) == 0.0);
  CHECK(empirical_w2_sq(Dataset(column({0, 0})), Dataset(column({-1, 1}))) == doctest::Approx(1.0));
  const auto p = hwd::test::normal_dataset(4, 2, rng), q = hwd::test::normal_dataset(4, 2, rng);
  CHECK(empirical_w2_sq(p, q) == doctest::Approx(brute_force_assignment(squared_distances(p.points, q.points)) / 4).epsilon(1e-12));
  CHECK_THROWS_AS(empirical_w2_sq(x, p), Error);
}

TEST_CASE("empirical W2 is a shift-equivariant metric") {
  Rng rng(23);
  for (int t = 0; t < 40; ++t) {
    const auto a = hwd::test::normal_dataset(12, 2, rng), b = hwd::test::normal_dataset(12, 2, rng, 1.0),
               c = hwd::test::normal_dataset(12, 2, rng, 0.0, 2.0);
    const double ab = empirical_w2_sq(a, b), ba = empirical_w2_sq(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(std::sqrt(empirical_w2_sq(a, c)) <= std::sqrt(ab) + std::sqrt(empirical_w2_sq(b, c)) + 1e-10);
    Matrix sa = a.points, sb = b.points;
    sa.rowwise() += Eigen::RowVector2d(3.0, -7.0);
    sb.rowwise() += Eigen::RowVector2d(3.0, -7.0);
    CHECK(empirical_w2_sq(Dataset(sa), Dataset(sb)) == doctest::Approx(ab).epsilon(1e-9));
  }
}

TEST_CASE("quantile_w2_sq_1d") {
  const std::vector<double> x{0.25, 0.75}, y{0.0, 0.5}, yr{0.5, 0.0};
  CHECK(quantile_w2_sq_1d(x, y) == doctest::Approx(0.0625));
  CHECK(quantile_w2_sq_1d(x, yr) == quantile_w2_sq_1d(x, y));
  CHECK(quantile_w2_sq_1d(x, x) == 0.0);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(quantile_w2_sq_1d(x, three), Error);

  Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    const auto a = hwd::test::normal_dataset(9, 1, rng), b = hwd::test::normal_dataset(9, 1, rng, 0.5);
    const auto av = column_values(a.points, 0), bv = column_values(b.points, 0);
    CHECK(quantile_w2_sq_1d(av, bv) == doctest::Approx(empirical_w2_sq(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("quantile grid and empirical quantiles") {
  const auto g = quantile_grid(0.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(0.125));
  CHECK(g[3] == doctest::Approx(0.875));
  const std::vector<double> sorted{1, 2, 3, 4};
  const std::vector<double> s{0.25, 0.26, 1.0};
  const auto q = empirical_quantiles(sorted, s);
  CHECK(q == std::vector<double>{1, 2, 4});
}

TEST_CASE("trimmed_w2_sq_1d") {
  Rng rng(25);
  std::vector<double> x(200), y(200);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = 1.0 + 2.0 * rng.normal();
  const double exact = quantile_w2_sq_1d(x, y);
  CHECK(trimmed_w2_sq_1d(x, y, 0.0, 200 * 64) == doctest::Approx(exact).epsilon(1e-3));
  CHECK(trimmed_w2_sq_1d(x, x, 0.2) == 0.0);

  std::vector<double> zeros(50, 0.0), outliers(50, 0.0);
  outliers.front() = -1e6;
  outliers.back() = 1e6;
  CHECK(trimmed_w2_sq_1d(zeros, outliers, 0.05) == 0.0);
  CHECK(trimmed_w2_sq_1d(zeros, outliers, 0.0) > 0.0);

  for (double bad : {-0.1, 0.5, 0.7}) {
    try {
      trimmed_w2_sq_1d(x, y, bad);
      FAIL("expected InvalidTrim");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidTrim);
    }
  }
}
