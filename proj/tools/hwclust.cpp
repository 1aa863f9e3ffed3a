// hwclust: simulate collections of datasets, compute pairwise distances,
// cluster them and export elbow curves, MDS coordinates and barycenters.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwd/altdist.hpp"
#include "hwd/analyze.hpp"
#include "hwd/cluster.hpp"
#include "hwd/error.hpp"
#include "hwd/hybrid.hpp"
#include "hwd/io.hpp"
#include "hwd/pretest.hpp"
#include "hwd/simgen.hpp"

namespace fs = std::filesystem;
using namespace hwd;

namespace {

struct ModelFlags {
  std::string manifest;
  std::string method = "hybrid";
  std::size_t m = 100;
  std::uint64_t seed = 0;
  std::string pretest = "off";
  double alpha = 0.10;
  std::size_t permutations = 499;
  std::string encoding = "pullback";
  int degree = 4;
  double delta = 0.01;
  std::size_t grid = 512;
  std::size_t mds_dim = 2;
  std::string mds_base = "auto";
  bool raw_marginals = false;
  unsigned threads = 1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_method = true) {
  cmd->add_option("--manifest", f.manifest, "JSON manifest of datasets")->required()->check(CLI::ExistingFile);
  if (with_method) {
    cmd->add_option("--method", f.method,
                    "hybrid, gaussian, exact1d, marginal, transformed, energy, euclidean_mds");
  }
  cmd->add_option("--m", f.m, "reference anchors / transport subsample size")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--pretest", f.pretest, "off, energy or crossmatch")->check(CLI::IsMember({"off", "energy", "crossmatch"}));
  cmd->add_option("--alpha", f.alpha, "pretest level");
  cmd->add_option("--permutations", f.permutations, "energy pretest resamples");
  cmd->add_option("--encoding", f.encoding, "shape block: pullback or forward_nn")
      ->check(CLI::IsMember({"pullback", "forward_nn"}));
  cmd->add_option("--degree", f.degree, "polynomial degree for the transformed method");
  cmd->add_option("--delta", f.delta, "trim level for exact1d");
  cmd->add_option("--grid", f.grid, "quantile grid size");
  cmd->add_option("--mds-dim", f.mds_dim, "embedding dimension for euclidean_mds");
  cmd->add_option("--mds-base", f.mds_base, "distances embedded by euclidean_mds (auto: exact1d in 1D, else hybrid)");
  cmd->add_flag("--raw-marginals", f.raw_marginals, "marginal method on unstandardized coordinates");
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

// Everything one of the distance modes needs, built once per command.
struct Loaded {
  std::vector<ManifestEntry> entries;
  std::vector<Dataset> datasets;
  std::vector<std::string> ids;
  std::vector<std::size_t> truth;
  std::size_t skipped = 0;
  HybridModel hybrid;
  std::vector<GaussianSummary> gaussian;
  std::vector<Vector> profiles;
  std::vector<MarginalSummary> marginal;
  std::vector<TransformedSummary> transformed;
  DistanceMatrix distances;  // energy or MDS base
  std::vector<Vector> embedded;
};

std::string canonical_method(const std::string& name) {
  if (name == "energy" || name == "energy_medoid") return "energy";
  if (name == "mds" || name == "euclidean_mds") return "euclidean_mds";
  for (const char* known : {"hybrid", "gaussian", "exact1d", "marginal", "transformed"}) {
    if (name == known) return name;
  }
  throw Error(ErrorKind::InvalidParam, "unknown method '" + name + "'");
}

HybridOptions hybrid_options(const ModelFlags& f) {
  HybridOptions o;
  o.m = f.m;
  o.encoding = f.encoding == "forward_nn" ? ShapeEncoding::forward_nn : ShapeEncoding::pullback;
  return o;
}

DistanceMatrix distances_for(const std::string& method, Loaded& l, const ModelFlags& f);

void build(const std::string& method, Loaded& l, const ModelFlags& f) {
  const std::size_t n = l.datasets.size();
  if (method == "hybrid") {
    if (f.pretest == "off") {
      l.hybrid = fit_hybrid(l.datasets, f.seed, hybrid_options(f), f.threads);
    } else {
      PretestOptions p;
      p.alpha = f.alpha;
      p.method = parse_pretest_method(f.pretest);
      p.permutations = f.permutations;
      auto fitted = fit_hybrid_pretested(l.datasets, f.seed, p, hybrid_options(f), f.threads);
      l.hybrid = std::move(fitted.model);
      l.skipped = fitted.skipped;
    }
  } else if (method == "gaussian") {
    for (const auto& d : l.datasets) l.gaussian.push_back(summarize(d.points));
  } else if (method == "exact1d") {
    l.profiles = quantile_profiles_1d(l.datasets, f.delta, f.grid);
  } else if (method == "marginal") {
    l.marginal.resize(n);
    parallel_for(n, f.threads, [&](std::size_t j) { l.marginal[j] = marginal_summary(l.datasets[j], f.grid, !f.raw_marginals); });
  } else if (method == "transformed") {
    l.transformed.resize(n);
    parallel_for(n, f.threads, [&](std::size_t j) { l.transformed[j] = transformed_summary(l.datasets[j], f.degree); });
  } else if (method == "energy") {
    l.distances = pairwise_distances(
        n, [&](std::size_t i, std::size_t j) { return energy_distance(l.datasets[i], l.datasets[j]); }, f.threads);
  } else if (method == "euclidean_mds") {
    std::string base = f.mds_base;
    if (base == "auto") base = l.datasets.front().dim() == 1 ? "exact1d" : "hybrid";
    base = canonical_method(base);
    if (base == "euclidean_mds") throw Error(ErrorKind::InvalidParam, "MDS base cannot be euclidean_mds");
    build(base, l, f);
    l.distances = distances_for(base, l, f);
    const Embedding e = classical_mds(l.distances, f.mds_dim);
    for (Index i = 0; i < e.coords.rows(); ++i) l.embedded.push_back(e.coords.row(i).transpose());
  }
}

template <class Metric>
DistanceMatrix metric_distances(const Metric& metric, std::span<const typename Metric::Item> items, unsigned threads) {
  return pairwise_distances(
      items.size(), [&](std::size_t i, std::size_t j) { return metric.distance_sq(items[i], items[j]); }, threads);
}

DistanceMatrix distances_for(const std::string& method, Loaded& l, const ModelFlags& f) {
  if (method == "hybrid") return metric_distances(HybridMetric{}, std::span<const HybridTransform>(l.hybrid.transforms), f.threads);
  if (method == "gaussian") return metric_distances(GaussianMetric{}, std::span<const GaussianSummary>(l.gaussian), f.threads);
  if (method == "exact1d") {
    return metric_distances(VectorMetric{static_cast<double>(f.grid)}, std::span<const Vector>(l.profiles), f.threads);
  }
  if (method == "marginal") return metric_distances(MarginalMetric{}, std::span<const MarginalSummary>(l.marginal), f.threads);
  if (method == "transformed") {
    return metric_distances(TransformedMetric{}, std::span<const TransformedSummary>(l.transformed), f.threads);
  }
  if (method == "euclidean_mds") return metric_distances(VectorMetric{}, std::span<const Vector>(l.embedded), f.threads);
  return l.distances;
}

Loaded load(const ModelFlags& f, const std::string& method) {
  Loaded l;
  l.entries = read_manifest(f.manifest);
  l.datasets = load_datasets(l.entries);
  for (const auto& e : l.entries) l.ids.push_back(e.id);
  l.truth = manifest_labels(l.entries);
  build(method, l, f);
  return l;
}

template <class Result>
nlohmann::ordered_json result_json(const Result& r, const std::string& method, std::size_t k, const ModelFlags& f,
                                   const Loaded& l) {
  nlohmann::ordered_json doc;
  doc["mode"] = method;
  doc["k"] = k;
  doc["seed"] = f.seed;
  doc["ids"] = l.ids;
  doc["labels"] = r.labels;
  doc["within_cost"] = r.within_cost;
  doc["iterations"] = r.iterations;
  doc["cost_trace"] = r.cost_trace;
  if (method == "hybrid" && f.pretest != "off") {
    doc["pretest"] = f.pretest;
    doc["shape_skipped"] = l.skipped;
  }
  if (!l.truth.empty()) doc["ari"] = adjusted_rand_index(r.labels, l.truth);
  return doc;
}

template <class Metric>
nlohmann::ordered_json run_kmeans(const Metric& metric, std::span<const typename Metric::Item> items,
                                  const KMeansOptions& o, const std::string& method, const ModelFlags& f,
                                  const Loaded& l) {
  return result_json(lloyd_kmeans(metric, items, o), method, o.k, f, l);
}

nlohmann::ordered_json cluster_kmeans(const std::string& method, const KMeansOptions& o, const ModelFlags& f,
                                      Loaded& l) {
  if (method == "hybrid") return run_kmeans(HybridMetric{o.barycenter}, std::span<const HybridTransform>(l.hybrid.transforms), o, method, f, l);
  if (method == "gaussian") return run_kmeans(GaussianMetric{o.barycenter}, std::span<const GaussianSummary>(l.gaussian), o, method, f, l);
  if (method == "exact1d") {
    return run_kmeans(VectorMetric{static_cast<double>(f.grid)}, std::span<const Vector>(l.profiles), o, method, f, l);
  }
  if (method == "marginal") return run_kmeans(MarginalMetric{o.barycenter}, std::span<const MarginalSummary>(l.marginal), o, method, f, l);
  if (method == "transformed") {
    return run_kmeans(TransformedMetric{o.barycenter}, std::span<const TransformedSummary>(l.transformed), o, method, f, l);
  }
  if (method == "euclidean_mds") return run_kmeans(VectorMetric{}, std::span<const Vector>(l.embedded), o, method, f, l);
  auto doc = result_json(kmeans_medoids(l.distances, o), method, o.k, f, l);
  doc["mode"] = "energy_medoid";
  return doc;
}

template <class Metric>
std::vector<ElbowPoint> elbow_for(const Metric& metric, std::span<const typename Metric::Item> items, std::size_t kmax,
                                  const KMeansOptions& o) {
  return elbow_curve(metric, items, kmax, o);
}

std::vector<ElbowPoint> elbow_dispatch(const std::string& method, std::size_t kmax, const KMeansOptions& o,
                                       const ModelFlags& f, Loaded& l) {
  if (method == "hybrid") return elbow_for(HybridMetric{o.barycenter}, std::span<const HybridTransform>(l.hybrid.transforms), kmax, o);
  if (method == "gaussian") return elbow_for(GaussianMetric{o.barycenter}, std::span<const GaussianSummary>(l.gaussian), kmax, o);
  if (method == "exact1d") return elbow_for(VectorMetric{static_cast<double>(f.grid)}, std::span<const Vector>(l.profiles), kmax, o);
  if (method == "marginal") return elbow_for(MarginalMetric{o.barycenter}, std::span<const MarginalSummary>(l.marginal), kmax, o);
  if (method == "transformed") {
    return elbow_for(TransformedMetric{o.barycenter}, std::span<const TransformedSummary>(l.transformed), kmax, o);
  }
  if (method == "euclidean_mds") return elbow_for(VectorMetric{}, std::span<const Vector>(l.embedded), kmax, o);
  std::vector<std::size_t> items(l.datasets.size());
  for (std::size_t i = 0; i < items.size(); ++i) items[i] = i;
  return elbow_curve(MedoidMetric{&l.distances}, std::span<const std::size_t>(items), kmax, o);
}

void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  write_file_atomic(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster collections of empirical distributions with hybrid Wasserstein distances"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "write a simulated collection plus manifest and truth labels");
  std::string scenario, out_dir;
  ScenarioSpec spec;
  sim->add_option("scenario", scenario, "scenario name")->required()->check(CLI::IsMember(scenario_names()));
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--seed", spec.seed, "seed");
  sim->add_option("--n", spec.n_per_dataset, "observations per dataset");
  sim->add_option("--per-group", spec.per_group, "datasets per group");
  sim->add_option("--means", spec.group_means, "group means (ex1_1d_gauss3)")->delimiter(',');
  sim->add_option("--offsets", spec.mixture_offsets, "mixture offsets (ex3_1d_mixtures)")->delimiter(',');
  sim->add_option("--weights", spec.mixture_weights, "mixture weights (ex3_1d_mixtures)")->delimiter(',');

  // distances
  auto* dist = app.add_subcommand("distances", "pairwise distance matrix");
  ModelFlags dist_flags;
  std::string dist_out;
  add_model_flags(dist, dist_flags);
  dist->add_option("--out", dist_out, "dist.csv path")->required();

  // cluster
  auto* clu = app.add_subcommand("cluster", "cluster the datasets");
  ModelFlags clu_flags;
  std::string clu_out, algorithm = "kmeans";
  KMeansOptions clu_opts;
  std::size_t radius = 10;
  clu->add_option("--algorithm", algorithm, "kmeans, hierarchical, medoid-shift or barycenter-shift")
      ->check(CLI::IsMember({"kmeans", "hierarchical", "medoid-shift", "barycenter-shift"}));
  add_model_flags(clu, clu_flags);
  clu->add_option("--k", clu_opts.k, "number of clusters (kmeans, hierarchical)");
  clu->add_option("--restarts", clu_opts.restarts, "k-means restarts")->check(CLI::PositiveNumber);
  clu->add_option("--max-iter", clu_opts.max_iter, "Lloyd iterations")->check(CLI::PositiveNumber);
  clu->add_option("--r", radius, "neighbors for mode seeking");
  clu->add_option("--out", clu_out, "result.json path")->required();

  // elbow
  auto* elb = app.add_subcommand("elbow", "within-cluster cost for k = 1..kmax");
  ModelFlags elb_flags;
  std::string elb_out;
  std::size_t kmax = 8;
  KMeansOptions elb_opts;
  add_model_flags(elb, elb_flags);
  elb->add_option("--kmax", kmax, "largest k")->check(CLI::PositiveNumber);
  elb->add_option("--restarts", elb_opts.restarts, "k-means restarts")->check(CLI::PositiveNumber);
  elb->add_option("--out", elb_out, "elbow.csv path")->required();

  // mds
  auto* mds = app.add_subcommand("mds", "classical MDS coordinates from a distance file");
  std::string mds_in, mds_out, mds_labels;
  std::size_t mds_dim = 2;
  mds->add_option("--distances", mds_in, "dist.csv")->required()->check(CLI::ExistingFile);
  mds->add_option("--dim", mds_dim, "embedding dimension");
  mds->add_option("--labels", mds_labels, "result.json whose labels fill cluster_label")->check(CLI::ExistingFile);
  mds->add_option("--out", mds_out, "coords.csv path")->required();

  // barycenter
  auto* bar = app.add_subcommand("barycenter", "materialize the hybrid barycenter of chosen datasets");
  ModelFlags bar_flags;
  std::string bar_ids, bar_out;
  std::vector<double> bar_weights;
  add_model_flags(bar, bar_flags, false);
  bar->add_option("--ids", bar_ids, "comma-separated dataset ids")->required();
  bar->add_option("--weights", bar_weights, "barycenter weights (default equal)")->delimiter(',');
  bar->add_option("--out", bar_out, "points.csv path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hwclust: " << e.what() << '\n';
    return 1;
  }

  std::vector<fs::path> created;
  try {
    if (sim->parsed()) {
      spec.name = scenario;
      const Scenario s = generate(spec);
      fs::create_directories(out_dir);
      std::vector<ManifestEntry> entries;
      for (std::size_t j = 0; j < s.datasets.size(); ++j) {
        const fs::path file = fs::path(out_dir) / (s.datasets[j].id + ".csv");
        write_file_atomic(file, [&](std::ostream& out) { write_dataset_csv(out, s.datasets[j].points); });
        created.push_back(file);
        entries.push_back({s.datasets[j].id, file.filename(), s.labels[j]});
      }
      const fs::path manifest = fs::path(out_dir) / "manifest.json";
      write_file_atomic(manifest, [&](std::ostream& out) { write_manifest(out, entries); });
      created.push_back(manifest);
      const fs::path truth = fs::path(out_dir) / "truth.csv";
      write_file_atomic(truth, [&](std::ostream& out) {
        out << "id,true_label\n";
        for (const auto& e : entries) out << csv_field(e.id) << ',' << *e.true_label << '\n';
      });
      created.push_back(truth);
    } else if (dist->parsed()) {
      const std::string method = canonical_method(dist_flags.method);
      Loaded l = load(dist_flags, method);
      const DistanceMatrix d = distances_for(method, l, dist_flags);
      write_file_atomic(dist_out, [&](std::ostream& out) { write_distance_csv(out, l.ids, d); });
    } else if (clu->parsed()) {
      std::string method = canonical_method(clu_flags.method);
      clu_opts.seed = clu_flags.seed;
      clu_opts.threads = clu_flags.threads;
      nlohmann::ordered_json doc;
      if (algorithm == "kmeans") {
        Loaded l = load(clu_flags, method);
        doc = cluster_kmeans(method, clu_opts, clu_flags, l);
      } else if (algorithm == "hierarchical") {
        if (method != "hybrid") throw Error(ErrorKind::InvalidParam, "hierarchical merging uses the hybrid method");
        Loaded l = load(clu_flags, method);
        std::vector<std::size_t> sizes;
        for (const auto& d : l.datasets) sizes.push_back(static_cast<std::size_t>(d.size()));
        const MergeTree tree = hierarchical_single_linkage(l.hybrid.transforms, sizes, {}, clu_flags.threads);
        const auto labels = tree.cut(clu_opts.k);
        doc["mode"] = method;
        doc["algorithm"] = algorithm;
        doc["k"] = clu_opts.k;
        doc["seed"] = clu_flags.seed;
        doc["ids"] = l.ids;
        doc["labels"] = labels;
        nlohmann::ordered_json merges = nlohmann::ordered_json::array();
        for (const auto& mg : tree.merges) merges.push_back({mg.left, mg.right, mg.height, mg.size});
        doc["merges"] = merges;
        if (!l.truth.empty()) doc["ari"] = adjusted_rand_index(labels, l.truth);
      } else {
        Loaded l = load(clu_flags, method);
        ModeSeekResult r;
        if (algorithm == "medoid-shift") {
          r = medoid_shift(distances_for(method, l, clu_flags), radius);
        } else {
          if (method != "hybrid") throw Error(ErrorKind::InvalidParam, "barycenter-shift uses the hybrid method");
          r = barycenter_shift(l.hybrid.transforms, radius);
        }
        doc["mode"] = method;
        doc["algorithm"] = algorithm;
        doc["r"] = radius;
        doc["seed"] = clu_flags.seed;
        doc["ids"] = l.ids;
        doc["labels"] = r.labels;
        doc["clusters"] = r.clusters;
        doc["modes"] = r.modes;
        if (!l.truth.empty()) doc["ari"] = adjusted_rand_index(r.labels, l.truth);
      }
      write_json(clu_out, doc);
    } else if (elb->parsed()) {
      const std::string method = canonical_method(elb_flags.method);
      Loaded l = load(elb_flags, method);
      elb_opts.seed = elb_flags.seed;
      elb_opts.threads = elb_flags.threads;
      const auto curve = elbow_dispatch(method, kmax, elb_opts, elb_flags, l);
      write_file_atomic(elb_out, [&](std::ostream& out) {
        out << "k,S_k,inv_S_k\n";
        for (const auto& p : curve) out << p.k << ',' << format_double(p.within_cost) << ',' << format_double(p.inverse) << '\n';
      });
    } else if (mds->parsed()) {
      const auto labeled = read_distance_csv(mds_in);
      const Embedding e = classical_mds(labeled.distances, mds_dim);
      std::vector<std::size_t> labels;
      if (!mds_labels.empty()) {
        std::ifstream in(mds_labels);
        const auto doc = nlohmann::json::parse(in);
        labels = doc.at("labels").get<std::vector<std::size_t>>();
      }
      write_file_atomic(mds_out, [&](std::ostream& out) { write_coordinates_csv(out, labeled.ids, e, labels); });
    } else if (bar->parsed()) {
      Loaded l = load(bar_flags, "hybrid");
      const auto wanted = split_ids(bar_ids);
      std::vector<HybridTransform> parts;
      for (const auto& id : wanted) {
        const auto it = std::find(l.ids.begin(), l.ids.end(), id);
        if (it == l.ids.end()) throw Error(ErrorKind::InvalidParam, "unknown dataset id '" + id + "'");
        parts.push_back(l.hybrid.transforms[static_cast<std::size_t>(it - l.ids.begin())]);
      }
      if (parts.empty()) throw Error(ErrorKind::InvalidParam, "no dataset ids given");
      if (bar_weights.empty()) bar_weights.assign(parts.size(), 1.0 / static_cast<double>(parts.size()));
      const HybridTransform b = hybrid_barycenter(parts, bar_weights);
      const Dataset points = materialize_barycenter(b, l.hybrid.reference);
      write_file_atomic(bar_out, [&](std::ostream& out) { write_dataset_csv(out, points.points); });
    }
  } catch (const std::exception& e) {
    for (const auto& p : created) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    std::cerr << "hwclust: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
