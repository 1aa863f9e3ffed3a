#include "hwd/pretest.hpp"

#include <cmath>

#include "hwd/altdist.hpp"
#include "hwd/error.hpp"
#include "hwd/matching.hpp"
#include "hwd/parallel.hpp"
#include "hwd/rng.hpp"

namespace hwd {

namespace {

Matrix pooled_points(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Matrix euclidean_distances(const Matrix& pts) {
  const Index n = pts.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (pts.row(i) - pts.row(j)).norm();
  }
  return d;
}

PretestOutcome energy_test(const Matrix& pts, std::size_t n_first, std::uint64_t seed, std::size_t permutations) {
  const Matrix d = euclidean_distances(pts);
  std::vector<char> labels(static_cast<std::size_t>(pts.rows()), 0);
  for (std::size_t i = 0; i < n_first; ++i) labels[i] = 1;
  PretestOutcome out;
  out.method = PretestMethod::energy_permutation;
  out.statistic = energy_from_pooled(d, labels);
  const double cut = out.statistic - 1e-12 * std::max(1.0, std::abs(out.statistic));
  std::size_t at_least = 0;
  for (std::size_t b = 0; b < permutations; ++b) {
    Rng rng(derive_seed(seed, b));
    auto perm = labels;
    shuffle(perm, rng);
    if (energy_from_pooled(d, perm) >= cut) ++at_least;
  }
  out.p_value = static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
  return out;
}

PretestOutcome crossmatch_test(Matrix pts, std::size_t n_first, std::uint64_t seed) {
  std::vector<char> first(static_cast<std::size_t>(pts.rows()), 0);
  for (std::size_t i = 0; i < n_first; ++i) first[i] = 1;
  if (pts.rows() % 2 != 0) {
    Rng rng(seed);
    const auto drop = static_cast<Index>(rng.below(static_cast<std::uint64_t>(pts.rows())));
    Matrix kept(pts.rows() - 1, pts.cols());
    std::vector<char> kept_first;
    for (Index i = 0, r = 0; i < pts.rows(); ++i) {
      if (i == drop) continue;
      kept.row(r++) = pts.row(i);
      kept_first.push_back(first[static_cast<std::size_t>(i)]);
    }
    pts = std::move(kept);
    first = std::move(kept_first);
  }
  std::size_t n1 = 0;
  for (char f : first) n1 += f ? 1 : 0;
  const auto mate = min_weight_perfect_matching(euclidean_distances(pts));
  std::size_t cross = 0;
  for (std::size_t i = 0; i < mate.size(); ++i) {
    if (i < mate[i] && first[i] != first[mate[i]]) ++cross;
  }
  PretestOutcome out;
  out.method = PretestMethod::crossmatch;
  out.statistic = static_cast<double>(cross);
  out.p_value = std::min(1.0, crossmatch_cdf(n1, static_cast<std::size_t>(pts.rows()), cross));
  return out;
}

}  // namespace

std::string_view to_string(PretestMethod method) {
  return method == PretestMethod::crossmatch ? "crossmatch" : "energy";
}

PretestMethod parse_pretest_method(std::string_view name) {
  if (name == "energy" || name == "energy_permutation") return PretestMethod::energy_permutation;
  if (name == "crossmatch") return PretestMethod::crossmatch;
  throw Error(ErrorKind::InvalidParam, "unknown pretest method '" + std::string(name) + "'");
}

double crossmatch_pmf(std::size_t n_first, std::size_t n_total, std::size_t a1) {
  if (n_total % 2 != 0 || n_first > n_total) throw Error(ErrorKind::InvalidParam, "invalid cross-match sizes");
  const std::size_t n_second = n_total - n_first;
  if (a1 > n_first || a1 > n_second || (n_first - a1) % 2 != 0) return 0.0;
  const double pairs = static_cast<double>(n_total / 2);
  const double a2 = static_cast<double>((n_first - a1) / 2);
  const double a0 = static_cast<double>((n_second - a1) / 2);
  const double x = static_cast<double>(a1);
  const double log_choose = std::lgamma(static_cast<double>(n_total) + 1) - std::lgamma(static_cast<double>(n_first) + 1) -
                            std::lgamma(static_cast<double>(n_second) + 1);
  const double log_p = x * std::log(2.0) + std::lgamma(pairs + 1) - log_choose - std::lgamma(a0 + 1) -
                       std::lgamma(x + 1) - std::lgamma(a2 + 1);
  return std::exp(log_p);
}

double crossmatch_cdf(std::size_t n_first, std::size_t n_total, std::size_t a1) {
  double sum = 0.0;
  for (std::size_t a = 0; a <= a1; ++a) sum += crossmatch_pmf(n_first, n_total, a);
  return sum;
}

PretestOutcome pretest(const Dataset& a, const Dataset& b, std::uint64_t seed, const PretestOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha <= 1.0)) throw Error(ErrorKind::InvalidParam, "alpha must lie in (0, 1]");
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionError, "samples differ in dimension");
  const Matrix pts = pooled_points(a.points, b.points);
  const auto n_first = static_cast<std::size_t>(a.size());
  PretestOutcome out;
  if (options.method == PretestMethod::crossmatch) {
    out = crossmatch_test(pts, n_first, seed);
  } else {
    if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::InsufficientData, "energy test needs n, m >= 2");
    if (options.permutations < 1) throw Error(ErrorKind::InvalidParam, "need at least one permutation");
    out = energy_test(pts, n_first, seed, options.permutations);
  }
  out.reject = out.p_value <= options.alpha;
  return out;
}

HybridTransform transform_with_pretest(const StandardizedDataset& xt, const ReferenceMeasure& ref, std::uint64_t seed,
                                       const PretestOptions& pretest_options, const HybridOptions& options,
                                       PretestOutcome* outcome) {
  const auto m = static_cast<std::size_t>(ref.size());
  if (static_cast<Index>(m) > xt.size()) {
    throw Error(ErrorKind::SubsampleError, "subsample size exceeds dataset '" + xt.id + "'");
  }
  // Same draw as estimate_transport with this seed.
  Rng pick_rng(seed);
  const auto picks = sample_without_replacement(static_cast<std::size_t>(xt.size()), m, pick_rng);
  Matrix sub(static_cast<Index>(m), xt.dim());
  for (std::size_t i = 0; i < m; ++i) sub.row(static_cast<Index>(i)) = xt.points.row(static_cast<Index>(picks[i]));
  Rng ref_rng(derive_seed(seed, 1));
  const Matrix fresh = sample_reference(ref, m, ref_rng);
  const PretestOutcome result =
      pretest(Dataset(std::move(sub), xt.id), Dataset(fresh, "reference"), derive_seed(seed, 2), pretest_options);
  if (outcome) *outcome = result;
  if (!result.reject) return identity_shape_transform(xt, ref);
  const auto est = estimate_transport(xt, ref, m, seed, options.neighbors);
  return transform_from_estimate(xt, est, ref, options.encoding);
}

PretestedModel fit_hybrid_pretested(std::span<const Dataset> datasets, std::uint64_t seed,
                                    const PretestOptions& pretest_options, const HybridOptions& options,
                                    unsigned threads) {
  if (datasets.empty()) throw Error(ErrorKind::InvalidParam, "no datasets");
  PretestedModel out;
  auto& model = out.model;
  model.standardized.resize(datasets.size());
  parallel_for(datasets.size(), threads, [&](std::size_t j) { model.standardized[j] = standardize(datasets[j]); });
  model.reference = build_reference(model.standardized, options.m, derive_seed(seed, kReferenceStream));
  model.transforms.resize(datasets.size());
  out.outcomes.resize(datasets.size());
  parallel_for(datasets.size(), threads, [&](std::size_t j) {
    model.transforms[j] = transform_with_pretest(model.standardized[j], model.reference, derive_seed(seed, j),
                                                 pretest_options, options, &out.outcomes[j]);
  });
  for (const auto& t : model.transforms) out.skipped += t.shape_skipped ? 1 : 0;
  return out;
}

}  // namespace hwd
