#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"

#include "cgcn/error.hpp"
#include "cgcn/kernels.hpp"
#include "cgcn/synth.hpp"
#include "cgcn/trainer.hpp"

using namespace cgcn;

namespace {

Dataset sbm200(std::uint64_t seed) {
  return synth::sbm_dataset({{100, 100}, 0.1, 0.01, 8, 1.0, 1.0, 0.6, 0.2, seed});
}

TrainConfig small_config() {
  TrainConfig c;
  c.hidden = {16};
  c.epochs = 10;
  c.dropout_rate = 0.0;
  c.partitions = 1;
  c.clusters_per_batch = 1;
  return c;
}

std::vector<double> losses(const TrainReport& r) {
  std::vector<double> out;
  for (const auto& e : r.epochs) out.push_back(e.loss);
  return out;
}

// Truncated d-regular tree of depth 2: root, d children, d-1 grandchildren each.
std::vector<Edge> regular_tree(std::size_t d, std::size_t& n) {
  std::vector<Edge> e;
  n = 1;
  for (std::size_t c = 0; c < d; ++c) {
    const auto child = static_cast<Index>(n++);
    e.emplace_back(0, child);
    for (std::size_t g = 0; g + 1 < d; ++g) e.emplace_back(child, static_cast<Index>(n++));
  }
  return e;
}

}  // namespace

TEST_CASE("p=1 q=1 cluster training equals full-batch training") {
  for (Variant v : {Variant::kPlain, Variant::kDiagEnhanced}) {
    for (NormMode norm : {NormMode::kRow, NormMode::kSym}) {
      auto c = small_config();
      c.variant = v;
      c.norm_mode = norm;
      const auto ds = sbm200(3);
      const auto cluster = train(c, ds);
      c.mode = TrainMode::kFullBatch;
      c.partitions = 7;  // ignored in full-batch mode
      const auto full = train(c, ds);
      const auto a = losses(cluster.report), b = losses(full.report);
      REQUIRE(a.size() == 10);
      for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
      for (std::size_t l = 0; l < 2; ++l)
        CHECK(oracle::max_abs_diff(oracle::grid(cluster.model.weights[l]), oracle::grid(full.model.weights[l])) <=
              1e-12);
    }
  }
}

TEST_CASE("AX precomputation leaves the full-batch trajectory unchanged") {
  auto c = small_config();
  c.mode = TrainMode::kFullBatch;
  const auto ds = sbm200(4);
  const auto plain = train(c, ds);
  c.precompute_ax = true;
  const auto pre = train(c, ds);
  CHECK(losses(plain.report) == losses(pre.report));
  CHECK(plain.model.weights == pre.model.weights);
  CHECK(pre.report.epochs[0].counters.nnz_touched < plain.report.epochs[0].counters.nnz_touched);
}

TEST_CASE("SBM with block labels: full-batch oracle and cluster mode both fit the training set") {
  const auto ds = sbm200(5);
  auto c = small_config();
  c.epochs = 200;
  c.mode = TrainMode::kFullBatch;
  const auto full = train(c, ds);
  auto reached = [](const TrainReport& r) {
    for (const auto& e : r.epochs)
      if (e.train_acc == 1.0) return true;
    return false;
  };
  REQUIRE(reached(full.report));
  c.mode = TrainMode::kCluster;
  c.partitions = 2;
  c.clusters_per_batch = 1;
  CHECK(reached(train(c, ds).report));
}

TEST_CASE("config preconditions") {
  const auto ds = sbm200(1);
  auto c = small_config();
  c.epochs = 0;
  CHECK_THROWS_AS(train(c, ds), UsageError);
  c = small_config();
  c.clusters_per_batch = 2;
  CHECK_THROWS_AS(train(c, ds), UsageError);
  c = small_config();
  c.dropout_rate = 1.0;
  CHECK_THROWS_AS(train(c, ds), UsageError);
  c = small_config();
  c.task = Task::kMultilabel;
  CHECK_THROWS_AS(train(c, ds), InputError);
}

TEST_CASE("expansion_cost") {
  SUBCASE("star: 1 + d") {
    std::vector<Edge> e;
    for (Index i = 1; i <= 6; ++i) e.emplace_back(0, i);
    const auto a = from_edges(e, 7);
    const std::vector<Index> seeds{0};
    CHECK(expansion_cost(a, seeds, 1, std::nullopt, 1) == 7);
  }
  SUBCASE("d-regular tree, L=2: 1 + d + d^2") {
    for (std::size_t d : {2u, 3u, 4u, 5u}) {
      std::size_t n = 0;
      const auto edges = regular_tree(d, n);
      const auto a = from_edges(edges, n);
      const std::vector<Index> seeds{0};
      CHECK(expansion_cost(a, seeds, 2, std::nullopt, 1) == 1 + d + d * d);
    }
  }
  SUBCASE("sample cap r=2 bounds L=2 cost by 1+2+4") {
    std::size_t n = 0;
    const auto edges = regular_tree(5, n);
    const auto a = from_edges(edges, n);
    const std::vector<Index> seeds{0};
    for (std::uint64_t s = 0; s < 10; ++s) {
      CHECK(expansion_cost(a, seeds, 2, 2, s) <= 7);
      CHECK(expansion_cost(a, seeds, 2, 2, s) == expansion_cost(a, seeds, 2, 2, s));
    }
  }
  SUBCASE("geometric growth on a 3-regular graph") {
    const auto a = from_edges(synth::random_regular(1000, 3, 2), 1000);
    std::vector<Index> seeds(1000);
    std::iota(seeds.begin(), seeds.end(), 0);
    std::uint64_t prev = expansion_cost(a, seeds, 1, std::nullopt, 0);
    for (std::size_t l = 2; l <= 4; ++l) {
      const auto cur = expansion_cost(a, seeds, l, std::nullopt, 0);
      CHECK(static_cast<double>(cur) >= 1.8 * static_cast<double>(prev));
      prev = cur;
    }
  }
  SUBCASE("L=0 rejected") {
    const std::vector<Index> seeds{0};
    CHECK_THROWS_AS(expansion_cost(from_edges({}, 2), seeds, 0, std::nullopt, 0), InputError);
  }
}

TEST_CASE("cluster mode computes L*N embeddings per epoch") {
  const auto ds = synth::sbm_dataset({{150, 150, 100}, 0.05, 0.005, 8, 1.0, 1.0, 0.3, 0.2, 2});
  for (std::size_t layers = 2; layers <= 6; ++layers) {
    auto c = small_config();
    c.epochs = 2;
    c.layers = layers;
    c.hidden.assign(layers - 1, 8);
    c.partitions = 10;
    c.clusters_per_batch = 3;
    const auto r = train(c, ds);
    for (const auto& e : r.report.epochs) CHECK(e.counters.embeddings_computed == layers * 400);
  }
}

TEST_CASE("memory model") {
  // 100 nodes, F = 16 everywhere, two layers.
  Dataset ds = synth::sbm_dataset({{50, 50}, 0.1, 0.01, 16, 1.0, 1.0, 0.5, 0.2, 1});
  ds.labels.n_classes = 16;
  TrainConfig c;
  c.hidden = {16};
  c.mode = TrainMode::kFullBatch;
  const std::uint64_t weights = 2 * 16 * 16;
  CHECK(measure_memory_model(c, ds) == 2 * 100 * 16 + weights);

  std::vector<Index> assign(100);
  for (Index i = 0; i < 100; ++i) assign[i] = i / 10;
  const auto part = Partition::from_assignment(assign, 10);
  CostCounters counters;
  const std::vector<std::size_t> dims{16, 16, 16};
  for (Index t = 0; t < 10; ++t) {
    const std::vector<Index> ids{t};
    const auto b = build_batch(ds.graph, ds.features, ds.labels, part, ids, NormMode::kRow,
                               std::vector<char>(100, 1));
    accumulate_batch_counters(counters, b, b.adj_norm, dims, false);
  }
  CHECK(counters.peak_cached_floats == 2 * 10 * 16 + weights);

  c.mode = TrainMode::kCluster;
  c.partitions = 10;
  CHECK(measure_memory_model(c, ds) < 2 * 100 * 16 + weights);
}

TEST_CASE("metis-like batches keep more within-batch links than random ones") {
  int wins = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto ds = synth::sbm_dataset({{100, 100, 100, 100}, 0.08, 0.004, 4, 1.0, 1.0, 0.5, 0.2, s});
    std::vector<char> train(400, 1);
    auto mean_util = [&](const Partition& part) {
      double sum = 0.0;
      for (Index t = 0; t < 8; ++t) {
        const std::vector<Index> ids{t};
        sum += static_cast<double>(embedding_utilization(
            build_batch(ds.graph, ds.features, ds.labels, part, ids, NormMode::kRow, train)));
      }
      return sum / 8.0;
    };
    wins += mean_util(metis_like_partition(ds.graph, 8, s)) >= mean_util(random_partition(400, 8, s));
  }
  CHECK(wins == 20);
}

TEST_CASE("training is deterministic and independent of the thread cap") {
  const auto ds = sbm200(6);
  auto c = small_config();
  c.partitions = 4;
  c.clusters_per_batch = 2;
  c.dropout_rate = 0.2;
  c.variant = Variant::kResidual;
  c.layers = 3;
  c.hidden = {16, 16};
  const auto a = train(c, ds);
  const auto b = train(c, ds);
  CHECK(report_to_csv(a.report) == report_to_csv(b.report));
  CHECK(a.model.weights == b.model.weights);
  const int before = kernels::num_threads();
  kernels::set_num_threads(4);
  const auto t4 = train(c, ds);
  kernels::set_num_threads(before);
  CHECK(report_to_csv(a.report) == report_to_csv(t4.report));
  CHECK(a.model.weights == t4.model.weights);
}

TEST_CASE("inductive mode trains on the training-node graph only") {
  const auto ds = sbm200(7);
  auto c = small_config();
  c.inductive = true;
  c.partitions = 3;
  const auto r = train(c, ds);
  REQUIRE(r.partition.has_value());
  CHECK(r.partition->n_nodes() == ds.splits.train.size());
  CHECK(r.report.epochs[0].counters.embeddings_computed == 2 * ds.splits.train.size());
  const auto view = make_training_view(ds, ds.features, true);
  CHECK(view.graph == extract_submatrix(ds.graph, ds.splits.train));
  for (char t : view.in_train) CHECK(t == 1);
}

TEST_CASE("report outputs") {
  const auto ds = sbm200(8);
  auto c = small_config();
  c.epochs = 3;
  const auto r = train(c, ds);
  CHECK(r.report.epochs.size() == 3);
  const auto j = report_to_json(r.report);
  const auto parsed = nlohmann::json::parse(j.dump());
  for (const char* k : {"config", "epochs", "test_f1", "partition_seconds"}) CHECK(parsed.contains(k));
  for (const auto& e : parsed["epochs"]) {
    CHECK(std::isfinite(e["loss"].get<double>()));
    CHECK(e["counters"].contains("nnz_touched"));
  }
  const auto csv = report_to_csv(r.report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
