#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"

#include "cgcn/model.hpp"
#include "cgcn/optimizer.hpp"
#include "cgcn/sparse.hpp"

namespace cgcn {

// JSON container; every real is stored as its shortest round-trip decimal
// string, so write/read reproduces the bits exactly.
struct Checkpoint {
  static constexpr int kVersion = 1;

  GcnModel model;
  NormMode norm_mode = NormMode::kRow;
  bool feature_norm = true;
  std::optional<AdamState> adam;
};

nlohmann::ordered_json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace cgcn
