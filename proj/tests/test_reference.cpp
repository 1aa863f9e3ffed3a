#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hwd/error.hpp"
#include "hwd/reference.hpp"
#include "test_util.hpp"

using namespace hwd;
using hwd::test::column;
using hwd::test::normal_dataset;

namespace {

std::vector<StandardizedDataset> standardized_normals(std::size_t count, Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<StandardizedDataset> out;
  for (std::size_t j = 0; j < count; ++j) out.push_back(standardize(normal_dataset(n, d, rng)));
  return out;
}

}  // namespace

TEST_CASE("standardize two points") {
  const auto s = standardize(Dataset(column({0, 2})));
  CHECK(s.source_mean(0) == doctest::Approx(1.0));
  CHECK(s.source_cov_sqrt.matrix()(0, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.points(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(s.points(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("standardize errors and degenerate input") {
  try {
    standardize(Dataset(Matrix::Ones(2, 2)));
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  CHECK_THROWS_AS(standardize(Dataset(column({3, 3, 3}))), Error);
  // Points on a line in the plane: rank-deficient covariance.
  Matrix line(5, 2);
  for (Index i = 0; i < 5; ++i) line.row(i) << i, 2.0 * i;
  CHECK(standardize(Dataset(line)).degenerate);
}

TEST_CASE("standardized output has zero mean and identity covariance") {
  Rng rng(31);
  Matrix a(3, 3);
  a << 2, 0.5, 0, 0, 1, -0.3, 0, 0, 0.2;
  Matrix x = hwd::test::normal_matrix(200, 3, rng) * a;
  x.rowwise() += Eigen::RowVector3d(4, -1, 10);
  const auto s = standardize(Dataset(x));
  const auto moments = summarize(s.points);
  CHECK(moments.mean.norm() < 1e-12);
  CHECK(moments.cov.matrix().isApprox(Matrix::Identity(3, 3), 1e-10));
  const auto again = standardize(Dataset(s.points));
  CHECK((again.points - s.points).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("silverman bandwidth") {
  Rng rng(32);
  const Matrix x = hwd::test::normal_matrix(400, 2, rng);
  const Vector h = silverman_bandwidth(x);
  const double factor = std::pow(4.0 / (4.0 * 400.0), 1.0 / 6.0);
  const auto s = summarize(x);
  for (Index k = 0; k < 2; ++k) CHECK(h(k) == doctest::Approx(std::sqrt(s.cov.matrix()(k, k)) * factor));
}

TEST_CASE("build_reference is deterministic and validates m") {
  const auto st = standardized_normals(4, 50, 2, 33);
  const auto a = build_reference(st, 20, 7), b = build_reference(st, 20, 7);
  CHECK(a.anchors == b.anchors);
  CHECK(a.anchor_density == b.anchor_density);
  CHECK(a.id == b.id);
  CHECK(build_reference(st, 20, 8).id != a.id);
  for (Index s = 0; s < a.size(); ++s) CHECK(a.anchor_density(s) == kde_density(a, a.anchors.row(s).transpose()));
  try {
    build_reference(st, 0, 7);
    FAIL("expected InvalidParam");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParam);
  }
}

TEST_CASE("single dataset with one anchor") {
  const auto st = standardized_normals(1, 30, 1, 34);
  const auto ref = build_reference(st, 1, 3);
  REQUIRE(ref.size() == 1);
  CHECK(std::abs(ref.anchors(0, 0)) < 5.0);
  CHECK(ref.anchor_density(0) > 0.0);
}

TEST_CASE("anchor mean of a large standard normal pool") {
  const std::size_t m = 400;
  const auto ref = build_reference(standardized_normals(10, 500, 2, 35), m, 9);
  const Vector mean = ref.anchors.colwise().mean();
  for (Index k = 0; k < 2; ++k) CHECK(std::abs(mean(k)) <= 3.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("kde_density by hand") {
  ReferenceMeasure ref;
  ref.pooled = column({-1, 1});
  ref.bandwidth = Vector::Constant(1, 0.5);
  const double h = 0.5;
  const double kernel = std::exp(-0.5 / (h * h)) / (h * std::sqrt(2.0 * std::numbers::pi));
  CHECK(kde_density(ref, Vector::Zero(1)) == doctest::Approx(kernel).epsilon(1e-14));

  const double far = kde_density(ref, Vector::Constant(1, 10.0));
  CHECK(far > 0.0);
  CHECK(far < 1e-12);
  CHECK(std::isfinite(log_kde_density(ref, Vector::Constant(1, 1e3))));
  CHECK_THROWS_AS(kde_density(ref, Vector::Zero(2)), Error);
}

TEST_CASE("kde integrates to one") {
  const auto ref = build_reference(standardized_normals(3, 40, 1, 36), 5, 1);
  const double lo = ref.pooled.minCoeff() - 5 * ref.bandwidth(0), hi = ref.pooled.maxCoeff() + 5 * ref.bandwidth(0);
  const int steps = 20000;
  const double dx = (hi - lo) / steps;
  double total = 0.0;
  for (int i = 0; i < steps; ++i) total += kde_density(ref, Vector::Constant(1, lo + (i + 0.5) * dx)) * dx;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sample_reference draws from the kernel mixture") {
  const auto ref = build_reference(standardized_normals(3, 100, 1, 37), 10, 2);
  Rng rng(5);
  const Matrix draws = sample_reference(ref, 20000, rng);
  const auto s = summarize(draws);
  const auto p = summarize(ref.pooled);
  const double var = p.cov.matrix()(0, 0) * (ref.pooled.rows() - 1.0) / ref.pooled.rows() + ref.bandwidth(0) * ref.bandwidth(0);
  CHECK(std::abs(s.mean(0) - p.mean(0)) < 0.05);
  CHECK(s.cov.matrix()(0, 0) == doctest::Approx(var).epsilon(0.05));
}
