#include "cgcn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgcn/checkpoint.hpp"
#include "cgcn/config.hpp"
#include "cgcn/dataset.hpp"
#include "cgcn/error.hpp"
#include "cgcn/partition.hpp"
#include "cgcn/rng.hpp"
#include "cgcn/trainer.hpp"

namespace cgcn {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

Histogram histogram(const std::vector<double>& values, double hi, std::size_t bins) {
  Histogram h;
  hi = std::max(hi, 1e-12);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(hi * static_cast<double>(b) / static_cast<double>(bins));
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor(v / hi * static_cast<double>(bins)));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

Json histogram_json(const Histogram& h) {
  Json j;
  j["bin_edges"] = h.edges;
  j["counts"] = h.counts;
  return j;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Json quality_json(const PartitionQuality& q) {
  Json j;
  j["edge_cut"] = q.edge_cut;
  j["within_edges"] = q.within_edges;
  j["within_fraction"] = q.within_fraction;
  j["balance"] = q.balance;
  if (!q.label_entropy.empty()) {
    j["label_entropy"] = q.label_entropy;
    j["mean_entropy"] = mean(q.label_entropy);
  }
  return j;
}

struct PartitionArgs {
  std::string data, method = "metis", out, quality;
  std::size_t clusters = 0;
  std::uint64_t seed = 1;
};

int cmd_partition(const PartitionArgs& a, std::ostream& out) {
  if (a.method != "metis" && a.method != "random") throw UsageError("--method must be metis or random");
  const Dataset ds = load_dataset(a.data);
  const auto t0 = std::chrono::steady_clock::now();
  const Partition p = a.method == "metis" ? metis_like_partition(ds.graph, a.clusters, a.seed)
                                          : random_partition(ds.n_nodes(), a.clusters, a.seed);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_partition(p, a.out);
  Json j;
  j["clusters"] = p.n_clusters;
  j["method"] = a.method;
  j["seed"] = a.seed;
  j["seconds"] = seconds;
  j.update(quality_json(quality(ds.graph, p, &ds.labels)));
  const std::string qpath = a.quality.empty() ? a.out + ".quality.json" : a.quality;
  write_file_atomic(qpath, j.dump(2) + "\n");
  out << "wrote " << a.out << " (" << p.n_clusters << " clusters, edge_cut " << j["edge_cut"].get<std::size_t>()
      << ", within_fraction " << j["within_fraction"].get<double>() << ")\n";
  return 0;
}

struct TrainArgs {
  std::string data, config, partition, out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig rc = load_run_config(a.config);
  if (!a.data.empty()) rc.data = a.data;
  if (!a.partition.empty()) rc.partition = a.partition;
  if (!a.out.empty()) rc.out = a.out;
  if (!rc.data) throw UsageError("train: --data is required (or 'data' in the config)");
  if (!rc.out) throw UsageError("train: --out is required (or 'out' in the config)");

  const Dataset ds = load_dataset(*rc.data, rc.train.task);
  std::optional<Partition> part;
  if (rc.partition) part = read_partition(*rc.partition);
  const TrainResult r = train(rc.train, ds, part);

  fs::create_directories(*rc.out);
  write_file_atomic(*rc.out / "report.json", report_to_json(r.report).dump(2) + "\n");
  write_file_atomic(*rc.out / "report.csv", report_to_csv(r.report));
  write_checkpoint({r.model, rc.train.norm_mode, rc.train.feature_norm, r.adam}, *rc.out / "checkpoint.json");
  if (r.partition) write_partition(*r.partition, *rc.out / "partition.tsv");
  const auto& last = r.report.epochs.back();
  out << "epochs " << r.report.epochs.size() << "  final loss " << last.loss << "  val_f1 " << last.val_f1
      << "  test_f1 " << r.report.test_f1 << "\n";
  return 0;
}

struct EvalArgs {
  std::string data, checkpoint;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Checkpoint c = read_checkpoint(a.checkpoint);
  const Dataset ds = load_dataset(a.data, c.model.task);
  if (ds.features.cols() != c.model.dims.front() || ds.labels.n_classes > c.model.dims.back()) {
    throw InputError("eval: checkpoint dimensions do not match the dataset");
  }
  LabelTable labels = ds.labels;
  labels.n_classes = c.model.dims.back();
  const DenseMatrix x = c.feature_norm ? normalize_features(ds.features, ds.splits.train) : ds.features;
  const Metrics m = predict_metrics(c.model, ds.graph, x, labels, ds.splits.test, c.norm_mode);
  out << "test_micro_f1 " << format_double(m.micro_f1) << "\n";
  out << "test_accuracy " << format_double(m.accuracy) << "\n";
  return 0;
}

struct BenchArgs {
  std::string data;
  std::size_t layers = 2, sample_cap = 10, clusters = 10, hidden = 64;
  std::uint64_t seed = 1;
};

int cmd_bench_cost(const BenchArgs& a, std::ostream& out) {
  const Dataset ds = load_dataset(a.data);
  if (a.clusters > ds.n_nodes()) throw UsageError("--clusters exceeds node count");
  const Partition part = metis_like_partition(ds.graph, a.clusters, derive_seed(a.seed, SeedStream::kPartition));
  std::vector<char> in_train(ds.n_nodes(), 1);
  out << "layers\texpansion_full\texpansion_sampled\tcluster_embeddings\tcluster_nnz_touched\t"
         "cluster_utilization\tcluster_peak_floats\n";
  for (std::size_t l = 1; l <= a.layers; ++l) {
    const std::uint64_t full = expansion_cost(ds.graph, ds.splits.train, l, std::nullopt, a.seed);
    const std::uint64_t sampled = expansion_cost(ds.graph, ds.splits.train, l, a.sample_cap, a.seed);
    std::vector<std::size_t> dims{ds.features.cols()};
    dims.insert(dims.end(), l - 1, a.hidden);
    dims.push_back(ds.labels.n_classes);
    CostCounters c;
    const EpochSchedule s = make_schedule(part.n_clusters, 1, a.seed, 0);
    for (std::size_t b = 0; b < s.n_groups(); ++b) {
      const Batch batch = build_batch(ds.graph, ds.features, ds.labels, part, s.group(b), NormMode::kRow, in_train);
      accumulate_batch_counters(c, batch, batch.adj_norm, dims, false);
    }
    out << l << '\t' << full << '\t' << sampled << '\t' << c.embeddings_computed << '\t' << c.nnz_touched << '\t'
        << c.utilization_sum << '\t' << c.peak_cached_floats << '\n';
  }
  return 0;
}

struct InspectArgs {
  std::string data, partition;
  std::size_t bins = 10;
  std::uint64_t seed = 1;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const Dataset ds = load_dataset(a.data);
  const Partition p = read_partition(a.partition);
  if (p.n_nodes() != ds.n_nodes()) throw InputError("inspect: partition does not cover the dataset's nodes");
  const double max_entropy = std::log(static_cast<double>(std::max<std::size_t>(2, ds.labels.n_classes)));
  const PartitionQuality q = quality(ds.graph, p, &ds.labels);
  const Partition r = random_partition(ds.n_nodes(), p.n_clusters, a.seed);
  const PartitionQuality rq = quality(ds.graph, r, &ds.labels);

  Json j;
  j["clusters"] = p.n_clusters;
  j.update(quality_json(q));
  j["histogram"] = histogram_json(histogram(q.label_entropy, max_entropy, a.bins));
  Json rj = quality_json(rq);
  rj["seed"] = a.seed;
  rj["histogram"] = histogram_json(histogram(rq.label_entropy, max_entropy, a.bins));
  j["random_baseline"] = std::move(rj);
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster-GCN training engine"};
  app.require_subcommand(1);

  PartitionArgs pa;
  auto* partition = app.add_subcommand("partition", "Cluster the graph and write a partition file");
  partition->add_option("--data", pa.data, "Dataset directory")->required();
  partition->add_option("--clusters", pa.clusters, "Number of clusters")->required();
  partition->add_option("--method", pa.method, "metis or random");
  partition->add_option("--seed", pa.seed, "Random seed");
  partition->add_option("--out", pa.out, "Partition file to write")->required();
  partition->add_option("--quality", pa.quality, "Quality JSON path (default <out>.quality.json)");

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "Train a GCN and write report + checkpoint");
  trainc->add_option("--data", ta.data, "Dataset directory");
  trainc->add_option("--config", ta.config, "JSON run configuration")->required();
  trainc->add_option("--partition", ta.partition, "Use this partition file instead of partitioning");
  trainc->add_option("--out", ta.out, "Output directory");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Report test micro-F1 of a checkpoint");
  eval->add_option("--data", ea.data, "Dataset directory")->required();
  eval->add_option("--checkpoint", ea.checkpoint, "Checkpoint file")->required();

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench-cost", "Compare neighbourhood expansion and cluster-batch costs");
  bench->add_option("--data", ba.data, "Dataset directory")->required();
  bench->add_option("--layers", ba.layers, "Largest layer count")->required()->check(CLI::PositiveNumber);
  bench->add_option("--sample-cap", ba.sample_cap, "Neighbour sample cap")->required()->check(CLI::PositiveNumber);
  bench->add_option("--clusters", ba.clusters, "Clusters for the cluster-mode counters")->check(CLI::PositiveNumber);
  bench->add_option("--hidden", ba.hidden, "Hidden width")->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "Random seed");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "Partition quality and label-entropy histogram");
  inspect->add_option("--data", ia.data, "Dataset directory")->required();
  inspect->add_option("--partition", ia.partition, "Partition file")->required();
  inspect->add_option("--bins", ia.bins, "Histogram bins")->check(CLI::PositiveNumber);
  inspect->add_option("--seed", ia.seed, "Seed of the random-partition baseline");

  std::vector<std::string> argv_store{"cluster_gcn"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*partition) return cmd_partition(pa, out);
    if (*trainc) return cmd_train(ta, out);
    if (*eval) return cmd_eval(ea, out);
    if (*bench) return cmd_bench_cost(ba, out);
    if (*inspect) return cmd_inspect(ia, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cgcn
