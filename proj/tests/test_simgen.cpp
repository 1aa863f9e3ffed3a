#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hwd/error.hpp"
#include "hwd/simgen.hpp"

using namespace hwd;

namespace {

Scenario make(const std::string& name, std::uint64_t seed = 1) {
  ScenarioSpec s;
  s.name = name;
  s.seed = seed;
  return generate(s);
}

std::size_t count(const std::vector<std::size_t>& labels, std::size_t g) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), g));
}

}  // namespace

TEST_CASE("every scenario is deterministic") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const auto a = make(name, 9), b = make(name, 9), c = make(name, 10);
    REQUIRE(a.datasets.size() == b.datasets.size());
    REQUIRE(a.labels.size() == a.datasets.size());
    for (std::size_t j = 0; j < a.datasets.size(); ++j) {
      CHECK(a.datasets[j].points == b.datasets[j].points);
      CHECK(a.datasets[j].id == b.datasets[j].id);
    }
    CHECK(a.labels == b.labels);
    CHECK(a.datasets[0].points != c.datasets[0].points);
  }
  CHECK_THROWS_AS(make("nope"), Error);
}

TEST_CASE("scenario shapes") {
  const auto e1 = make("ex1_1d_gauss3");
  CHECK(e1.datasets.size() == 15);
  for (std::size_t g = 0; g < 3; ++g) CHECK(count(e1.labels, g) == 5);
  CHECK(e1.datasets[0].size() == 100);
  CHECK(e1.datasets[0].dim() == 1);
  CHECK(e1.datasets[0].id == "d000");

  const auto e2 = make("ex2_1d_gauss_vs_twopoint");
  CHECK(e2.datasets.size() == 40);
  CHECK(count(e2.labels, 1) == 20);

  const auto e3 = make("ex3_1d_mixtures");
  CHECK(e3.datasets.size() == 30);

  const auto b2 = make("biv2_circles4");
  CHECK(b2.datasets.size() == 40);
  CHECK(b2.datasets[0].dim() == 2);

  const auto t = make("transformed_normal_rademacher");
  CHECK(t.datasets.size() == 100);
  CHECK(t.datasets[0].size() == 1000);
}

TEST_CASE("two-point group has mean 0 and variance 1") {
  const auto e2 = make("ex2_1d_gauss_vs_twopoint", 3);
  for (std::size_t j = 0; j < e2.datasets.size(); ++j) {
    if (e2.labels[j] != 1) continue;
    const auto& x = e2.datasets[j].points;
    CHECK(std::abs(x.mean()) < 0.35);
    CHECK(x.array().square().mean() == 1.0);
  }
}

TEST_CASE("mixture groups share the first two moments") {
  ScenarioSpec s;
  s.name = "ex3_1d_mixtures";
  s.seed = 4;
  s.n_per_dataset = 20000;
  s.per_group = 1;
  const auto sc = generate(s);
  for (const auto& d : sc.datasets) {
    const double mean = d.points.mean();
    CHECK(std::abs(mean) < 0.03);
    CHECK((d.points.array() - mean).square().mean() == doctest::Approx(1.0).epsilon(0.04));
  }
  s.mixture_weights = {0.5};
  CHECK_THROWS_AS(generate(s), Error);
}

TEST_CASE("circles lie on their circles") {
  const auto b3 = make("biv3_gauss_vs_circle", 5);
  for (std::size_t j = 0; j < b3.datasets.size(); ++j) {
    if (b3.labels[j] != 0) continue;
    const auto& x = b3.datasets[j].points;
    for (Index i = 0; i < x.rows(); ++i) CHECK(std::abs(x.row(i).norm() - std::sqrt(2.0)) < 1e-14);
  }
}

TEST_CASE("overrides") {
  ScenarioSpec s;
  s.name = "ex1_1d_gauss3";
  s.n_per_dataset = 7;
  s.per_group = 2;
  s.group_means = {0, 100};
  const auto sc = generate(s);
  CHECK(sc.datasets.size() == 4);
  CHECK(sc.datasets[3].size() == 7);
  CHECK(sc.datasets[3].points.mean() > 90.0);
}
