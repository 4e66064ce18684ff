#include "cgcn/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cgcn/error.hpp"
#include "cgcn/kernels.hpp"
#include "cgcn/rng.hpp"

namespace cgcn {

std::vector<std::size_t> layer_dims(const TrainConfig& config, const Dataset& dataset) {
  std::vector<std::size_t> dims{dataset.features.cols()};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(dataset.labels.n_classes);
  return dims;
}

std::uint64_t embedding_utilization(const Batch& batch) { return batch.adj_raw.nnz(); }

void accumulate_batch_counters(CostCounters& c, const Batch& batch, const SparseMatrix& prop,
                               std::span<const std::size_t> dims, bool precomputed) {
  const std::size_t n_layers = dims.size() - 1;
  const std::uint64_t b = batch.size();
  c.embeddings_computed += b * n_layers;
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (l == 0 && precomputed) continue;
    c.nnz_touched += prop.nnz() * dims[l];
  }
  c.utilization_sum += embedding_utilization(batch);
  std::uint64_t activations = 0, weights = 0;
  for (std::size_t l = 1; l <= n_layers; ++l) activations += b * dims[l];
  for (std::size_t l = 0; l < n_layers; ++l) weights += dims[l] * dims[l + 1];
  c.peak_cached_floats = std::max(c.peak_cached_floats, activations + weights);
}

std::uint64_t expansion_cost(const SparseMatrix& a, std::span<const Index> seeds, std::size_t layers,
                             std::optional<std::size_t> sample_cap, std::uint64_t seed) {
  if (layers < 1) throw InputError("expansion_cost: need at least one layer");
  const std::size_t n = a.n_rows;
  // cost[v] = evaluations in the expansion tree rooted at (v, current layer).
  std::vector<std::uint64_t> prev(n, 1), cur(n, 0);
  std::vector<Index> nbrs;
  for (std::size_t l = 1; l <= layers; ++l) {
    for (std::size_t v = 0; v < n; ++v) {
      nbrs.clear();
      for (Index u : a.row_cols(v)) {
        if (static_cast<std::size_t>(u) != v) nbrs.push_back(u);
      }
      if (sample_cap && nbrs.size() > *sample_cap) {
        Rng rng(derive_seed(seed, l, v));
        for (std::size_t i = 0; i < *sample_cap; ++i) {
          std::swap(nbrs[i], nbrs[i + uniform_index(rng, nbrs.size() - i)]);
        }
        nbrs.resize(*sample_cap);
      }
      std::uint64_t total = 1;
      for (Index u : nbrs) total += prev[u];
      cur[v] = total;
    }
    std::swap(prev, cur);
  }
  std::uint64_t sum = 0;
  for (Index s : seeds) sum += prev.at(static_cast<std::size_t>(s));
  return sum;
}

TrainingView make_training_view(const Dataset& dataset, const DenseMatrix& features, bool inductive) {
  TrainingView v;
  const std::size_t n = dataset.n_nodes();
  if (!inductive) {
    v.graph = dataset.graph;
    v.features = features;
    v.labels = dataset.labels;
    v.in_train.assign(n, 0);
    for (Index t : dataset.splits.train) v.in_train[t] = 1;
    v.to_global.resize(n);
    std::iota(v.to_global.begin(), v.to_global.end(), 0);
    return v;
  }
  v.to_global = dataset.splits.train;
  std::sort(v.to_global.begin(), v.to_global.end());
  v.graph = extract_submatrix(dataset.graph, v.to_global);
  v.features = DenseMatrix(v.to_global.size(), features.cols());
  for (std::size_t i = 0; i < v.to_global.size(); ++i) {
    const auto src = features.row(v.to_global[i]);
    std::copy(src.begin(), src.end(), v.features.row(i).begin());
  }
  v.labels = dataset.labels.slice(v.to_global);
  v.in_train.assign(v.to_global.size(), 1);
  return v;
}

Partition partition_for(const TrainConfig& config, const SparseMatrix& graph) {
  if (config.mode == TrainMode::kFullBatch) {
    return Partition::from_assignment(std::vector<Index>(graph.n_rows, 0), 1);
  }
  const std::uint64_t seed = derive_seed(config.seed, SeedStream::kPartition);
  return config.partition_method == PartitionMethod::kMetis
             ? metis_like_partition(graph, config.partitions, seed)
             : random_partition(graph.n_rows, config.partitions, seed);
}

namespace {

DenseMatrix gather_rows(const DenseMatrix& x, std::span<const Index> rows) {
  DenseMatrix out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  const std::optional<Partition>& partition) {
  config.validate();
  dataset.validate();
  if (dataset.splits.train.empty()) throw InputError("train: training split is empty");
  if (config.task && *config.task != dataset.task()) {
    throw InputError("train: config task does not match the dataset's labels");
  }

  const DenseMatrix features = config.feature_norm
                                   ? normalize_features(dataset.features, dataset.splits.train)
                                   : dataset.features;
  const TrainingView view = make_training_view(dataset, features, config.inductive);
  const std::vector<std::size_t> dims = layer_dims(config, dataset);

  TrainResult result;
  result.report.config = config;

  const auto t_part = std::chrono::steady_clock::now();
  Partition part = partition && config.mode == TrainMode::kCluster ? *partition
                                                                   : partition_for(config, view.graph);
  result.report.partition_seconds = seconds_since(t_part);
  if (part.n_nodes() != view.graph.n_rows) {
    throw InputError("train: partition covers " + std::to_string(part.n_nodes()) +
                     " nodes but the training graph has " + std::to_string(view.graph.n_rows));
  }
  part.validate();
  const std::size_t q = config.mode == TrainMode::kFullBatch ? 1 : config.clusters_per_batch;
  if (q > part.n_clusters) throw InputError("train: clusters_per_batch exceeds partition count");

  GcnModel model = GcnModel::init(dims, config.variant, config.lambda, dataset.task(),
                                  derive_seed(config.seed, SeedStream::kInit));
  AdamState adam = AdamState::for_weights(model.weights, config.lr);

  DenseMatrix ax;
  if (config.precompute_ax) {
    const Propagation full = make_propagation(config.variant, view.graph, config.norm_mode, config.lambda);
    ax = precompute_ax(full.forward, view.features);
  }

  // Evaluation always runs on the all-node graph.
  const Propagation eval_prop =
      make_propagation(config.variant, dataset.graph, config.norm_mode, config.lambda);

  const std::uint64_t schedule_seed = derive_seed(config.seed, SeedStream::kSchedule);
  const std::uint64_t dropout_seed = derive_seed(config.seed, SeedStream::kDropout);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    const auto t0 = std::chrono::steady_clock::now();
    const EpochSchedule schedule = make_schedule(part.n_clusters, q, schedule_seed, epoch);
    double weighted_loss = 0.0;
    double weight = 0.0;
    for (std::size_t bi = 0; bi < schedule.n_groups(); ++bi) {
      const Batch batch = build_batch(view.graph, view.features, view.labels, part, schedule.group(bi),
                                      config.norm_mode, view.in_train);
      const Propagation prop =
          make_propagation(model.variant, batch.adj_raw, batch.adj_norm, model.lambda);
      accumulate_batch_counters(rec.counters, batch, prop.forward, dims, config.precompute_ax);
      if (batch.n_train() == 0) {
        ++rec.empty_batches;
        continue;
      }
      const DenseMatrix input = config.precompute_ax ? gather_rows(ax, batch.global_ids) : batch.features;
      ForwardTrace trace;
      LossGrad lg;
      try {
        trace = forward(model, prop, input,
                        {config.dropout_rate, derive_seed(dropout_seed, epoch, bi), true,
                         config.precompute_ax});
        lg = loss_and_grad(model, trace, prop, batch.labels, batch.train_mask);
        if (!std::isfinite(lg.loss)) throw NumericError("loss is not finite");
        adam_step(adam, model.weights, lg.grads);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(bi) + ": " + e.what());
      }
      weighted_loss += lg.loss * static_cast<double>(batch.size());
      weight += static_cast<double>(batch.size());
    }
    rec.loss = weight > 0.0 ? weighted_loss / weight : 0.0;
    rec.seconds = seconds_since(t0);

    const ForwardTrace eval = forward(model, eval_prop, features, {});
    if (!dataset.splits.val.empty()) {
      rec.val_f1 = score_logits(model.task, eval.logits, dataset.labels, dataset.splits.val).micro_f1;
    }
    rec.train_acc = score_logits(model.task, eval.logits, dataset.labels, dataset.splits.train).accuracy;
    result.report.epochs.push_back(rec);
  }

  if (!dataset.splits.test.empty()) {
    const ForwardTrace eval = forward(model, eval_prop, features, {});
    result.report.test_f1 = score_logits(model.task, eval.logits, dataset.labels, dataset.splits.test).micro_f1;
  }
  result.model = std::move(model);
  result.adam = std::move(adam);
  if (config.mode == TrainMode::kCluster) result.partition = std::move(part);
  return result;
}

std::uint64_t measure_memory_model(const TrainConfig& config, const Dataset& dataset) {
  config.validate();
  const TrainingView view = make_training_view(dataset, dataset.features, config.inductive);
  const std::vector<std::size_t> dims = layer_dims(config, dataset);
  const Partition part = partition_for(config, view.graph);
  const std::size_t q = config.mode == TrainMode::kFullBatch ? 1 : config.clusters_per_batch;
  const EpochSchedule schedule =
      make_schedule(part.n_clusters, q, derive_seed(config.seed, SeedStream::kSchedule), 0);
  CostCounters c;
  std::size_t max_b = 0;
  for (std::size_t bi = 0; bi < schedule.n_groups(); ++bi) {
    const Batch batch = build_batch(view.graph, view.features, view.labels, part, schedule.group(bi),
                                    config.norm_mode, view.in_train);
    accumulate_batch_counters(c, batch, batch.adj_norm, dims, config.precompute_ax);
    max_b = std::max(max_b, batch.size());
  }
  std::uint64_t weights = 0, per_node = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) weights += dims[l] * dims[l + 1];
  for (std::size_t l = 1; l < dims.size(); ++l) per_node += dims[l];
  const std::uint64_t full_peak = view.graph.n_rows * per_node + weights;
  if (max_b < view.graph.n_rows && !(c.peak_cached_floats < full_peak)) {
    throw std::logic_error("memory model: cluster peak is not below the full-batch peak");
  }
  return c.peak_cached_floats;
}

nlohmann::ordered_json report_to_json(const TrainReport& r) {
  nlohmann::ordered_json j;
  j["config"] = to_json(r.config);
  j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : r.epochs) {
    nlohmann::ordered_json ej;
    ej["epoch"] = e.epoch;
    ej["loss"] = e.loss;
    ej["val_f1"] = e.val_f1;
    ej["train_acc"] = e.train_acc;
    ej["seconds"] = e.seconds;
    ej["empty_batches"] = e.empty_batches;
    ej["counters"] = {{"embeddings_computed", e.counters.embeddings_computed},
                      {"nnz_touched", e.counters.nnz_touched},
                      {"peak_cached_floats", e.counters.peak_cached_floats},
                      {"utilization_sum", e.counters.utilization_sum}};
    j["epochs"].push_back(std::move(ej));
  }
  j["test_f1"] = r.test_f1;
  j["partition_seconds"] = r.partition_seconds;
  return j;
}

std::string report_to_csv(const TrainReport& r) {
  // Wall-clock time is left out so identical runs produce identical bytes.
  std::ostringstream out;
  out << "epoch,loss,val_f1,train_acc,embeddings_computed,nnz_touched,peak_cached_floats,utilization_sum\n";
  for (const auto& e : r.epochs) {
    out << e.epoch << ',' << format_double(e.loss) << ',' << format_double(e.val_f1) << ','
        << format_double(e.train_acc) << ',' << e.counters.embeddings_computed << ','
        << e.counters.nnz_touched << ',' << e.counters.peak_cached_floats << ','
        << e.counters.utilization_sum << '\n';
  }
  return out.str();
}

}  // namespace cgcn
