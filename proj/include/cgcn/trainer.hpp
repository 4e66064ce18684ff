#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgcn/batch.hpp"
#include "cgcn/config.hpp"
#include "cgcn/dataset.hpp"
#include "cgcn/model.hpp"
#include "cgcn/optimizer.hpp"
#include "cgcn/partition.hpp"

namespace cgcn {

// Per-epoch work and memory counters.
struct CostCounters {
  std::uint64_t embeddings_computed = 0;  // node-layer embedding evaluations
  std::uint64_t nnz_touched = 0;          // sum over layers of nnz(A') * F_in
  std::uint64_t peak_cached_floats = 0;   // max_b (b * sum_l F_l) + sum_l F_l F_{l+1}
  std::uint64_t utilization_sum = 0;      // sum over batches of nnz(A_BB)

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double val_f1 = 0.0;
  double train_acc = 0.0;
  double seconds = 0.0;
  std::size_t empty_batches = 0;  // batches skipped for lack of training nodes
  CostCounters counters;
};

struct TrainReport {
  TrainConfig config;
  std::vector<EpochRecord> epochs;
  double test_f1 = 0.0;
  double partition_seconds = 0.0;
};

struct TrainResult {
  TrainReport report;
  GcnModel model;
  AdamState adam;
  std::optional<Partition> partition;
};

// Cluster-GCN training loop (cluster mode) or full-batch gradient descent.
// `partition`, when given, replaces the configured partitioner and must cover
// the training graph.
TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  const std::optional<Partition>& partition = std::nullopt);

// Widths F_0..F_L implied by a config and dataset.
std::vector<std::size_t> layer_dims(const TrainConfig& config, const Dataset& dataset);

// nnz of the batch's un-normalized adjacency.
std::uint64_t embedding_utilization(const Batch& batch);

// Adds one batch's work to `c`. `precomputed` skips layer-0 propagation.
void accumulate_batch_counters(CostCounters& c, const Batch& batch, const SparseMatrix& prop,
                               std::span<const std::size_t> dims, bool precomputed);

// Embedding evaluations of recursive L-hop neighbourhood expansion from
// `seeds`: every node at layer l needs its (sampled) neighbours at layer l-1,
// counted along the expansion tree. With `sample_cap`, each node at each layer
// uses min(deg, cap) neighbours drawn from a seeded stream.
std::uint64_t expansion_cost(const SparseMatrix& a, std::span<const Index> seeds, std::size_t layers,
                             std::optional<std::size_t> sample_cap, std::uint64_t seed);

// Peak activation floats over one epoch's batches plus weight floats.
std::uint64_t measure_memory_model(const TrainConfig& config, const Dataset& dataset);

// Node-level view of the data the trainer sees: the whole graph, or only
// training nodes in the inductive setting.
struct TrainingView {
  SparseMatrix graph;
  DenseMatrix features;
  LabelTable labels;
  std::vector<char> in_train;
  std::vector<Index> to_global;
};

TrainingView make_training_view(const Dataset& dataset, const DenseMatrix& features, bool inductive);

// Partition of the training view per config (partitioner seeded from the run seed).
Partition partition_for(const TrainConfig& config, const SparseMatrix& graph);

nlohmann::ordered_json report_to_json(const TrainReport& r);
std::string report_to_csv(const TrainReport& r);

}  // namespace cgcn
