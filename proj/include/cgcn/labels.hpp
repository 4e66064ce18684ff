#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cgcn/matrix.hpp"

namespace cgcn {

enum class Task { kMulticlass, kMultilabel };

Task parse_task(std::string_view s);
std::string_view to_string(Task t);

// Per-node label ids. Multiclass rows hold exactly one id; multilabel rows
// hold a sorted, duplicate-free id set (possibly empty).
struct LabelTable {
  Task task = Task::kMulticlass;
  std::size_t n_classes = 0;
  std::vector<std::vector<std::int32_t>> ids;

  std::size_t size() const { return ids.size(); }

  // Rows of `nodes`, in order.
  LabelTable slice(std::span<const Index> nodes) const;

  // 0/1 target matrix with one row per node.
  DenseMatrix one_hot() const;

  friend bool operator==(const LabelTable&, const LabelTable&) = default;
};

// Shannon entropy (nats) of the label histogram over `nodes`; multilabel rows
// contribute one count per id.
double label_entropy(const LabelTable& labels, std::span<const Index> nodes);

}  // namespace cgcn
