#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cgcn/labels.hpp"
#include "cgcn/model.hpp"
#include "cgcn/sparse.hpp"

namespace cgcn {

enum class TrainMode { kCluster, kFullBatch };
enum class PartitionMethod { kMetis, kRandom };

struct TrainConfig {
  std::size_t layers = 2;
  std::vector<std::size_t> hidden{64};  // L-1 widths
  Variant variant = Variant::kPlain;
  double lambda = 1.0;
  std::size_t partitions = 10;
  std::size_t clusters_per_batch = 1;
  std::size_t epochs = 200;
  double lr = 0.01;
  double dropout_rate = 0.2;
  std::uint64_t seed = 1;
  NormMode norm_mode = NormMode::kRow;
  std::optional<Task> task;  // inferred from labels when unset
  TrainMode mode = TrainMode::kCluster;
  PartitionMethod partition_method = PartitionMethod::kMetis;
  bool precompute_ax = false;
  bool inductive = false;
  bool feature_norm = true;

  // Throws UsageError naming the first offending key.
  void validate() const;
};

struct RunConfig {
  TrainConfig train;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> partition;
  std::optional<std::filesystem::path> out;
};

// Strict parse: unknown keys, wrong types and out-of-range values raise
// UsageError with the key name.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const TrainConfig& c);

}  // namespace cgcn
