#include "cgcn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cgcn/error.hpp"

namespace cgcn {
namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw UsageError("config key '" + key + "': " + why);
}

std::size_t get_count(const nlohmann::json& v, const std::string& key, std::size_t min) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  const auto x = v.get<long long>();
  if (x < static_cast<long long>(min)) bad(key, "must be >= " + std::to_string(min));
  return static_cast<std::size_t>(x);
}

double get_real(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

bool get_bool(const nlohmann::json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

template <typename F>
auto parse_enum(const nlohmann::json& v, const std::string& key, F&& parse) {
  const std::string s = get_string(v, key);
  try {
    return parse(s);
  } catch (const InputError& e) {
    bad(key, e.what());
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (layers < 1) bad("layers", "must be >= 1");
  if (hidden.size() != layers - 1) {
    bad("hidden", "needs layers-1 = " + std::to_string(layers - 1) + " widths, got " +
                      std::to_string(hidden.size()));
  }
  for (std::size_t h : hidden) {
    if (h < 1) bad("hidden", "widths must be >= 1");
  }
  if (variant == Variant::kResidual) {
    for (std::size_t i = 0; i + 1 < hidden.size(); ++i) {
      if (hidden[i] != hidden[i + 1]) bad("hidden", "residual variant needs equal hidden widths");
    }
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad("lambda", "must be a finite value >= 0");
  if (partitions < 1) bad("partitions", "must be >= 1");
  if (clusters_per_batch < 1 || clusters_per_batch > partitions) {
    bad("clusters_per_batch", "must lie in [1, partitions]");
  }
  if (epochs < 1) bad("epochs", "must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) bad("lr", "must be a finite value > 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) bad("dropout_rate", "must lie in [0, 1)");
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  RunConfig rc;
  TrainConfig& c = rc.train;
  bool hidden_given = false;
  nlohmann::json hidden_value;
  for (const auto& [key, v] : j.items()) {
    if (key == "layers") {
      c.layers = get_count(v, key, 1);
    } else if (key == "hidden") {
      hidden_given = true;
      hidden_value = v;
    } else if (key == "variant") {
      c.variant = parse_enum(v, key, parse_variant);
    } else if (key == "lambda") {
      c.lambda = get_real(v, key);
    } else if (key == "partitions") {
      c.partitions = get_count(v, key, 1);
    } else if (key == "clusters_per_batch") {
      c.clusters_per_batch = get_count(v, key, 1);
    } else if (key == "epochs") {
      c.epochs = get_count(v, key, 1);
    } else if (key == "lr") {
      c.lr = get_real(v, key);
    } else if (key == "dropout_rate") {
      c.dropout_rate = get_real(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        bad(key, "expected a non-negative integer");
      }
      c.seed = v.get<std::uint64_t>();
    } else if (key == "norm_mode") {
      c.norm_mode = parse_enum(v, key, parse_norm_mode);
    } else if (key == "task") {
      c.task = parse_enum(v, key, parse_task);
    } else if (key == "mode") {
      const std::string s = get_string(v, key);
      if (s == "cluster") {
        c.mode = TrainMode::kCluster;
      } else if (s == "full_batch") {
        c.mode = TrainMode::kFullBatch;
      } else {
        bad(key, "expected cluster|full_batch");
      }
    } else if (key == "partition_method") {
      const std::string s = get_string(v, key);
      if (s == "metis") {
        c.partition_method = PartitionMethod::kMetis;
      } else if (s == "random") {
        c.partition_method = PartitionMethod::kRandom;
      } else {
        bad(key, "expected metis|random");
      }
    } else if (key == "precompute_ax") {
      c.precompute_ax = get_bool(v, key);
    } else if (key == "inductive") {
      c.inductive = get_bool(v, key);
    } else if (key == "feature_norm") {
      c.feature_norm = get_bool(v, key);
    } else if (key == "data") {
      rc.data = get_string(v, key);
    } else if (key == "partition") {
      rc.partition = get_string(v, key);
    } else if (key == "out") {
      rc.out = get_string(v, key);
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
  if (hidden_given) {
    if (hidden_value.is_number_integer()) {
      c.hidden.assign(c.layers - 1, get_count(hidden_value, "hidden", 1));
    } else if (hidden_value.is_array()) {
      c.hidden.clear();
      for (const auto& h : hidden_value) c.hidden.push_back(get_count(h, "hidden", 1));
    } else {
      bad("hidden", "expected an integer or a list of integers");
    }
  } else {
    c.hidden.assign(c.layers - 1, 64);
  }
  c.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["layers"] = c.layers;
  j["hidden"] = c.hidden;
  j["variant"] = std::string(to_string(c.variant));
  j["lambda"] = c.lambda;
  j["partitions"] = c.partitions;
  j["clusters_per_batch"] = c.clusters_per_batch;
  j["epochs"] = c.epochs;
  j["lr"] = c.lr;
  j["dropout_rate"] = c.dropout_rate;
  j["seed"] = c.seed;
  j["norm_mode"] = std::string(to_string(c.norm_mode));
  if (c.task) j["task"] = std::string(to_string(*c.task));
  j["mode"] = c.mode == TrainMode::kCluster ? "cluster" : "full_batch";
  j["partition_method"] = c.partition_method == PartitionMethod::kMetis ? "metis" : "random";
  j["precompute_ax"] = c.precompute_ax;
  j["inductive"] = c.inductive;
  j["feature_norm"] = c.feature_norm;
  return j;
}

}  // namespace cgcn
