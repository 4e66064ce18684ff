#include "cgcn/labels.hpp"

#include <cmath>
#include <map>
#include <string>

#include "cgcn/error.hpp"

namespace cgcn {

Task parse_task(std::string_view s) {
  if (s == "multiclass") return Task::kMulticlass;
  if (s == "multilabel") return Task::kMultilabel;
  throw InputError("unknown task '" + std::string(s) + "' (expected multiclass|multilabel)");
}

std::string_view to_string(Task t) {
  return t == Task::kMulticlass ? "multiclass" : "multilabel";
}

LabelTable LabelTable::slice(std::span<const Index> nodes) const {
  LabelTable out;
  out.task = task;
  out.n_classes = n_classes;
  out.ids.reserve(nodes.size());
  for (Index g : nodes) out.ids.push_back(ids.at(static_cast<std::size_t>(g)));
  return out;
}

DenseMatrix LabelTable::one_hot() const {
  DenseMatrix y(ids.size(), n_classes);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (auto k : ids[i]) y(i, static_cast<std::size_t>(k)) = 1.0;
  }
  return y;
}

double label_entropy(const LabelTable& labels, std::span<const Index> nodes) {
  std::map<std::int32_t, double> hist;
  double total = 0.0;
  for (Index g : nodes) {
    for (auto k : labels.ids.at(static_cast<std::size_t>(g))) {
      hist[k] += 1.0;
      total += 1.0;
    }
  }
  double h = 0.0;
  for (const auto& [k, count] : hist) {
    const double q = count / total;
    h -= q * std::log(q);
  }
  return h;
}

}  // namespace cgcn
