#include "hwd/simgen.hpp"

#include <array>
#include <cstdio>
#include <cmath>
#include <functional>
#include <numbers>

#include "hwd/error.hpp"
#include "hwd/rng.hpp"

namespace hwd {

namespace {

using Sampler = std::function<Matrix(std::size_t n, Rng& rng)>;

struct Group {
  std::size_t count;
  Sampler sample;
};

Matrix gaussian(std::size_t n, Rng& rng, const Vector& mean, double sd) {
  Matrix out(static_cast<Index>(n), mean.size());
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = mean[j] + sd * rng.normal();
  }
  return out;
}

Matrix two_point(std::size_t n, Rng& rng) {
  Matrix out(static_cast<Index>(n), 1);
  for (Index i = 0; i < out.rows(); ++i) out(i, 0) = rng.below(2) == 0 ? -1.0 : 1.0;
  return out;
}

Matrix circle(std::size_t n, Rng& rng, double cx, double cy, double radius) {
  Matrix out(static_cast<Index>(n), 2);
  for (Index i = 0; i < out.rows(); ++i) {
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out(i, 0) = cx + radius * std::cos(t);
    out(i, 1) = cy + radius * std::sin(t);
  }
  return out;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::size_t pick(std::size_t value, std::size_t fallback) { return value == 0 ? fallback : value; }

std::vector<Group> groups_for(const ScenarioSpec& spec) {
  const std::string& name = spec.name;
  if (name == "ex1_1d_gauss3") {
    const std::vector<double> means = spec.group_means.empty() ? std::vector<double>{0.0, 2.0, 4.0} : spec.group_means;
    std::vector<Group> out;
    for (double mu : means) {
      out.push_back({pick(spec.per_group, 5), [mu](std::size_t n, Rng& rng) { return gaussian(n, rng, vec({mu}), 1.0); }});
    }
    return out;
  }
  if (name == "ex2_1d_gauss_vs_twopoint" || name == "transformed_normal_rademacher") {
    const std::size_t count = pick(spec.per_group, name == "ex2_1d_gauss_vs_twopoint" ? 20 : 50);
    return {{count, [](std::size_t n, Rng& rng) { return gaussian(n, rng, vec({0.0}), 1.0); }},
            {count, [](std::size_t n, Rng& rng) { return two_point(n, rng); }}};
  }
  if (name == "ex3_1d_mixtures") {
    const std::vector<double> offsets =
        spec.mixture_offsets.empty() ? std::vector<double>{0.0, 3.0, 2.5} : spec.mixture_offsets;
    std::vector<double> weights = spec.mixture_weights;
    if (weights.empty()) {
      weights = spec.mixture_offsets.empty() ? std::vector<double>{0.5, 0.5, 0.8} : std::vector<double>(offsets.size(), 0.5);
    }
    if (weights.size() != offsets.size()) throw Error(ErrorKind::InvalidParam, "one mixture weight per offset");
    std::vector<Group> out;
    for (std::size_t g = 0; g < offsets.size(); ++g) {
      const double a = offsets[g], w = weights[g];
      if (!(w > 0.0 && w < 1.0)) throw Error(ErrorKind::InvalidParam, "mixture weights must lie in (0, 1)");
      // w N(-a, 1) + (1 - w) N(a, 1) has mean (1 - 2w) a and variance 1 + 4 w (1 - w) a^2.
      const double mean = (1.0 - 2.0 * w) * a;
      const double scale = 1.0 / std::sqrt(1.0 + 4.0 * w * (1.0 - w) * a * a);
      out.push_back({pick(spec.per_group, 10), [a, w, mean, scale](std::size_t n, Rng& rng) {
                       Matrix x(static_cast<Index>(n), 1);
                       for (Index i = 0; i < x.rows(); ++i) {
                         const double center = rng.uniform() < w ? -a : a;
                         x(i, 0) = scale * (center + rng.normal() - mean);
                       }
                       return x;
                     }});
    }
    return out;
  }
  if (name == "biv1_gauss_gauss_unif") {
    const std::size_t count = pick(spec.per_group, 20);
    return {{count, [](std::size_t n, Rng& rng) { return gaussian(n, rng, vec({0.0, 0.0}), 1.0); }},
            {count, [](std::size_t n, Rng& rng) { return gaussian(n, rng, vec({5.0, 5.0}), 1.0); }},
            {count, [](std::size_t n, Rng& rng) {
               Matrix x(static_cast<Index>(n), 2);
               for (Index i = 0; i < x.rows(); ++i) x(i, 0) = rng.uniform(), x(i, 1) = rng.uniform();
               return x;
             }}};
  }
  if (name == "biv2_circles4") {
    static constexpr std::array<std::array<double, 2>, 4> corners{{{-8.0, -8.0}, {8.0, -8.0}, {-8.0, 8.0}, {8.0, 8.0}}};
    std::vector<Group> out;
    for (std::size_t g = 0; g < 4; ++g) {
      const double lo = 0.5 + static_cast<double>(g);
      out.push_back({pick(spec.per_group, 10), [g, lo](std::size_t n, Rng& rng) {
                       const double cx = corners[g][0] + rng.uniform(-1.0, 1.0);
                       const double cy = corners[g][1] + rng.uniform(-1.0, 1.0);
                       const double radius = rng.uniform(lo, lo + 0.5);
                       return circle(n, rng, cx, cy, radius);
                     }});
    }
    return out;
  }
  if (name == "biv3_gauss_vs_circle" || name == "marginal_normal_circle") {
    const std::size_t count = pick(spec.per_group, 50);
    const Sampler round = [](std::size_t n, Rng& rng) { return circle(n, rng, 0.0, 0.0, std::numbers::sqrt2); };
    const Sampler normal = [](std::size_t n, Rng& rng) { return gaussian(n, rng, vec({0.0, 0.0}), 1.0); };
    if (name == "biv3_gauss_vs_circle") return {{count, round}, {count, normal}};
    return {{count, normal}, {count, round}};
  }
  if (name == "medoid4_gauss") {
    static constexpr std::array<std::array<double, 2>, 4> corners{{{0.0, 0.0}, {8.0, 0.0}, {0.0, 8.0}, {8.0, 8.0}}};
    std::vector<Group> out;
    for (std::size_t g = 0; g < 4; ++g) {
      out.push_back({pick(spec.per_group, 20), [g](std::size_t n, Rng& rng) {
                       const Vector mean = vec({corners[g][0] + 1.2 * rng.normal(), corners[g][1] + 1.2 * rng.normal()});
                       return gaussian(n, rng, mean, 1.0);
                     }});
    }
    return out;
  }
  throw Error(ErrorKind::InvalidParam, "unknown scenario '" + name + "'");
}

std::size_t default_size(const std::string& name) { return name == "transformed_normal_rademacher" ? 1000 : 100; }

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "ex1_1d_gauss3",         "ex2_1d_gauss_vs_twopoint", "ex3_1d_mixtures",
      "biv1_gauss_gauss_unif", "biv2_circles4",            "biv3_gauss_vs_circle",
      "medoid4_gauss",         "marginal_normal_circle",   "transformed_normal_rademacher"};
  return names;
}

Scenario generate(const ScenarioSpec& spec) {
  const auto groups = groups_for(spec);
  const std::size_t n = pick(spec.n_per_dataset, default_size(spec.name));
  Scenario out;
  std::size_t j = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t c = 0; c < groups[g].count; ++c, ++j) {
      Rng rng(derive_seed(spec.seed, j));
      char id[32];
      std::snprintf(id, sizeof id, "d%03zu", j);
      out.datasets.emplace_back(groups[g].sample(n, rng), id);
      out.labels.push_back(g);
    }
  }
  return out;
}

}  // namespace hwd
