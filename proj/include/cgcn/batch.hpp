#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cgcn/labels.hpp"
#include "cgcn/matrix.hpp"
#include "cgcn/partition.hpp"
#include "cgcn/sparse.hpp"

namespace cgcn {

// Induced subgraph over the union of sampled clusters.
struct Batch {
  std::vector<Index> global_ids;
  SparseMatrix adj_raw;   // A[ids, ids], between-cluster links included
  SparseMatrix adj_norm;  // adj_raw renormalized with the subgraph's own degrees
  DenseMatrix features;
  LabelTable labels;
  std::vector<char> train_mask;
  std::vector<Index> cluster_ids;

  std::size_t size() const { return global_ids.size(); }
  std::size_t n_train() const;
};

struct EpochSchedule {
  std::vector<Index> order;
  std::size_t group_size = 1;

  std::size_t n_groups() const { return (order.size() + group_size - 1) / group_size; }
  std::span<const Index> group(std::size_t i) const;
};

// Fresh permutation of [0, p) for (seed, epoch), cut into groups of q.
EpochSchedule make_schedule(std::size_t p, std::size_t q, std::uint64_t seed, std::uint64_t epoch);

// `in_train` is indexed by global node id.
Batch build_batch(const SparseMatrix& a_full, const DenseMatrix& x, const LabelTable& y,
                  const Partition& part, std::span<const Index> cluster_ids, NormMode norm_mode,
                  const std::vector<char>& in_train);

// Per-batch Shannon entropy (nats) of the training-label histogram.
std::vector<double> batch_label_entropy(std::span<const Batch> batches);

}  // namespace cgcn
