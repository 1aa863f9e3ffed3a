#include <doctest.h>

#include <cmath>
#include <vector>

#include "hwd/error.hpp"
#include "hwd/matgauss.hpp"
#include "test_util.hpp"

using namespace hwd;
using hwd::test::random_spd;

namespace {

SpdMatrix diag(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return SpdMatrix(Matrix(v.asDiagonal()));
}

SpdMatrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return SpdMatrix(m);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("SpdMatrix validation") {
  CHECK(kind_of([] { mat2(1, 0.5, 0, 1); }) == ErrorKind::InvalidMatrix);
  CHECK(kind_of([] { mat2(1, 2, 2, 1); }) == ErrorKind::NotPsd);
  CHECK(kind_of([] { SpdMatrix(Matrix(2, 3)); }) == ErrorKind::InvalidMatrix);
  // Tiny negative eigenvalues within tolerance are accepted.
  CHECK_NOTHROW(mat2(1, 1, 1, 1 - 1e-14));
}

TEST_CASE("spd_sqrt examples") {
  CHECK(spd_sqrt(SpdMatrix::identity(3)).matrix().isApprox(Matrix::Identity(3, 3), 1e-14));
  const Matrix d = spd_sqrt(diag({4, 9})).matrix();
  CHECK(d(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(d(0, 1)) < 1e-14);

  // [[2,1],[1,2]] = Q diag(3, 1) Q^T with Q = [[1,1],[1,-1]]/sqrt(2).
  const Matrix s = spd_sqrt(mat2(2, 1, 1, 2)).matrix();
  const double r3 = std::sqrt(3.0);
  CHECK(s(0, 0) == doctest::Approx((r3 + 1) / 2).epsilon(1e-13));
  CHECK(s(0, 1) == doctest::Approx((r3 - 1) / 2).epsilon(1e-13));
  CHECK(s(1, 1) == doctest::Approx((r3 + 1) / 2).epsilon(1e-13));
}

TEST_CASE("spd_sqrt squares back for conditioned matrices") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_spd(1 + static_cast<Index>(t % 5), rng, 1e6);
    const Matrix s = spd_sqrt(a).matrix();
    CHECK((s * s - a.matrix()).norm() / a.matrix().norm() <= 1e-8);
  }
}

TEST_CASE("spd_inv_sqrt inverts the square root") {
  Rng rng(12);
  const auto a = random_spd(4, rng, 100.0);
  const Matrix r = spd_inv_sqrt(a) * spd_sqrt(a).matrix();
  CHECK(r.isApprox(Matrix::Identity(4, 4), 1e-10));
}

TEST_CASE("bures_sq examples") {
  Rng rng(13);
  const auto a = random_spd(3, rng);
  CHECK(std::abs(bures_sq(a, a)) <= 1e-12);
  CHECK(bures_sq(SpdMatrix::identity(2), diag({4, 4})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bures_sq(diag({1, 4}), diag({4, 1})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kind_of([] { bures_sq(SpdMatrix::identity(2), SpdMatrix::identity(3)); }) == ErrorKind::DimensionError);
}

TEST_CASE("bures_sq is symmetric and positive off the diagonal") {
  Rng rng(14);
  for (int t = 0; t < 100; ++t) {
    const Index d = 1 + static_cast<Index>(t % 4);
    const auto a = random_spd(d, rng), b = random_spd(d, rng);
    CHECK(bures_sq(a, b) == bures_sq(b, a));
    CHECK(bures_sq(a, b) > 0.0);
  }
}

TEST_CASE("gaussian_wasserstein_sq examples") {
  GaussianSummary p{Vector::Zero(1), SpdMatrix::identity(1)};
  GaussianSummary q{Vector::Constant(1, 5.0), SpdMatrix::identity(1)};
  CHECK(gaussian_wasserstein_sq(p, q) == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(gaussian_wasserstein_sq(p, p) == 0.0);
  GaussianSummary a{Vector::Zero(2), SpdMatrix::identity(2)};
  GaussianSummary b{Vector::Zero(2), diag({4, 4})};
  CHECK(gaussian_wasserstein_sq(a, b) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kind_of([&] { gaussian_wasserstein_sq(p, a); }) == ErrorKind::DimensionError);
}

TEST_CASE("gaussian distance satisfies the triangle inequality") {
  Rng rng(15);
  for (int t = 0; t < 100; ++t) {
    GaussianSummary g[3];
    for (auto& x : g) x = {hwd::test::normal_matrix(3, 1, rng).col(0), random_spd(3, rng)};
    const double ab = std::sqrt(gaussian_wasserstein_sq(g[0], g[1]));
    const double bc = std::sqrt(gaussian_wasserstein_sq(g[1], g[2]));
    const double ac = std::sqrt(gaussian_wasserstein_sq(g[0], g[2]));
    CHECK(ac <= ab + bc + 1e-10);
  }
}

TEST_CASE("summarize uses the n - 1 denominator") {
  Matrix x(3, 1);
  x << 1, 2, 6;
  const auto s = summarize(x);
  CHECK(s.mean(0) == doctest::Approx(3.0));
  CHECK(s.cov.matrix()(0, 0) == doctest::Approx(7.0));
  CHECK(summarize(Matrix::Ones(1, 2)).cov.matrix().isZero());
}

TEST_CASE("bures_barycenter examples") {
  Rng rng(16);
  const auto s0 = random_spd(3, rng);
  const std::vector<SpdMatrix> same{s0, s0, s0};
  const std::vector<double> w3{0.2, 0.3, 0.5};
  CHECK(bures_barycenter(same, w3).matrix().isApprox(s0.matrix(), 1e-10));

  const std::vector<SpdMatrix> one_d{diag({1}), diag({4})};
  const std::vector<double> half{0.5, 0.5};
  CHECK(bures_barycenter(one_d, half).matrix()(0, 0) == doctest::Approx(2.25).epsilon(1e-8));

  const std::vector<SpdMatrix> comm{diag({1, 9}), diag({9, 1})};
  CHECK(bures_barycenter(comm, half).matrix().isApprox(Matrix(diag({4, 4}).matrix()), 1e-8));
}

TEST_CASE("barycenter of a scale family stays in the family") {
  Rng rng(17);
  const auto s0 = random_spd(3, rng, 50.0);
  const std::vector<double> c{0.5, 2.0, 7.0};
  const std::vector<double> w{0.5, 0.25, 0.25};
  std::vector<SpdMatrix> covs;
  double root = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    covs.push_back(SpdMatrix(c[j] * s0.matrix()));
    root += w[j] * std::sqrt(c[j]);
  }
  const auto b = bures_barycenter(covs, w);
  CHECK((b.matrix() - root * root * s0.matrix()).norm() / s0.matrix().norm() <= 1e-7);
  CHECK(barycenter_residual(b, covs, w) <= 1e-8);
}

TEST_CASE("bures_barycenter reports non-convergence with the residual") {
  Rng rng(18);
  const std::vector<SpdMatrix> covs{random_spd(3, rng, 1e3), random_spd(3, rng, 1e3)};
  const std::vector<double> w{0.5, 0.5};
  try {
    bures_barycenter(covs, w, {1, 1e-300});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.kind() == ErrorKind::ConvergenceError);
    CHECK(e.last_residual() > 0.0);
  }
}

TEST_CASE("check_simplex") {
  const std::vector<double> ok{0.25, 0.75}, neg{-0.5, 1.5}, off{0.5, 0.6};
  CHECK_NOTHROW(check_simplex(ok, 2));
  CHECK(kind_of([&] { check_simplex(neg, 2); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([&] { check_simplex(off, 2); }) == ErrorKind::InvalidParam);
  CHECK_THROWS_AS(check_simplex(ok, 3), Error);
}

TEST_CASE("gaussian_barycenter averages means") {
  const std::vector<GaussianSummary> parts{{Vector::Zero(1), diag({1})}, {Vector::Constant(1, 4.0), diag({4})}};
  const std::vector<double> w{0.75, 0.25};
  const auto g = gaussian_barycenter(parts, w);
  CHECK(g.mean(0) == doctest::Approx(1.0));
  CHECK(g.cov.matrix()(0, 0) == doctest::Approx(1.25 * 1.25).epsilon(1e-8));
}
