#include "cgcn/batch.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cgcn/error.hpp"
#include "cgcn/rng.hpp"

namespace cgcn {

std::size_t Batch::n_train() const {
  return static_cast<std::size_t>(std::count(train_mask.begin(), train_mask.end(), 1));
}

std::span<const Index> EpochSchedule::group(std::size_t i) const {
  const std::size_t begin = i * group_size;
  const std::size_t end = std::min(order.size(), begin + group_size);
  return std::span<const Index>(order).subspan(begin, end - begin);
}

EpochSchedule make_schedule(std::size_t p, std::size_t q, std::uint64_t seed, std::uint64_t epoch) {
  if (q < 1 || q > p) {
    throw InputError("clusters per batch q=" + std::to_string(q) + " must lie in [1, p=" +
                     std::to_string(p) + "]");
  }
  EpochSchedule s;
  s.group_size = q;
  s.order.resize(p);
  std::iota(s.order.begin(), s.order.end(), 0);
  Rng rng(derive_seed(seed, epoch));
  for (std::size_t i = p; i > 1; --i) std::swap(s.order[i - 1], s.order[uniform_index(rng, i)]);
  return s;
}

Batch build_batch(const SparseMatrix& a_full, const DenseMatrix& x, const LabelTable& y,
                  const Partition& part, std::span<const Index> cluster_ids, NormMode norm_mode,
                  const std::vector<char>& in_train) {
  Batch b;
  std::vector<char> seen(part.n_clusters, 0);
  for (Index t : cluster_ids) {
    if (t < 0 || static_cast<std::size_t>(t) >= part.n_clusters) {
      throw InputError("build_batch: cluster id " + std::to_string(t) + " out of range");
    }
    if (seen[t]) throw InputError("build_batch: cluster id " + std::to_string(t) + " repeated");
    seen[t] = 1;
    b.cluster_ids.push_back(t);
    b.global_ids.insert(b.global_ids.end(), part.clusters[t].begin(), part.clusters[t].end());
  }
  if (b.global_ids.empty()) throw InputError("build_batch: empty cluster union");

  b.adj_raw = extract_submatrix(a_full, b.global_ids);
  b.adj_norm = normalize(b.adj_raw, norm_mode);
  b.features = DenseMatrix(b.size(), x.cols());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto src = x.row(b.global_ids[i]);
    std::copy(src.begin(), src.end(), b.features.row(i).begin());
  }
  b.labels = y.slice(b.global_ids);
  b.train_mask.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) b.train_mask[i] = in_train[b.global_ids[i]];
  return b;
}

std::vector<double> batch_label_entropy(std::span<const Batch> batches) {
  std::vector<double> out;
  out.reserve(batches.size());
  for (const Batch& b : batches) {
    std::vector<Index> rows;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b.train_mask[i]) rows.push_back(static_cast<Index>(i));
    }
    out.push_back(label_entropy(b.labels, rows));
  }
  return out;
}

}  // namespace cgcn
