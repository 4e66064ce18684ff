#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "cgcn/labels.hpp"
#include "cgcn/matrix.hpp"

namespace cgcn {

// Disjoint cover of [0, N) by non-empty clusters.
struct Partition {
  std::size_t n_clusters = 0;
  std::vector<Index> assignment;
  std::vector<std::vector<Index>> clusters;

  std::size_t n_nodes() const { return assignment.size(); }

  // Builds the cluster lists from an assignment vector; throws InputError when
  // a cluster id is out of range or a cluster is empty.
  static Partition from_assignment(std::vector<Index> assignment, std::size_t n_clusters);

  void validate() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct PartitionQuality {
  std::size_t edge_cut = 0;
  std::size_t within_edges = 0;
  double within_fraction = 1.0;
  double balance = 1.0;
  std::vector<double> label_entropy;
};

Partition metis_like_partition(const SparseMatrix& a, std::size_t c, std::uint64_t seed);
Partition random_partition(std::size_t n, std::size_t c, std::uint64_t seed);

PartitionQuality quality(const SparseMatrix& a, const Partition& p,
                         const LabelTable* labels = nullptr);

// Largest cluster size the partitioner accepts: max(ceil(N/c), floor(1.3 N/c)).
std::size_t hard_cluster_cap(std::size_t n, std::size_t c);

// "<node_id>\t<cluster_id>" per line, nodes ascending.
void write_partition(const Partition& p, const std::filesystem::path& path);
Partition read_partition(const std::filesystem::path& path);

namespace detail {

// Weighted graph used by the multilevel partitioner. Edge weights count
// original edges; vertex weights count original nodes.
struct WeightedGraph {
  std::vector<std::int64_t> xadj{0};
  std::vector<Index> adjncy;
  std::vector<std::int64_t> adjwgt;
  std::vector<std::int64_t> vwgt;
  // Weight of original edges collapsed inside coarse vertices.
  std::int64_t collapsed = 0;

  std::size_t n() const { return vwgt.size(); }
  std::int64_t total_edge_weight() const;  // each undirected edge once
};

struct CoarseLevel {
  WeightedGraph graph;
  std::vector<Index> fine_to_coarse;
};

WeightedGraph from_adjacency(const SparseMatrix& a);

// One round of heavy-edge matching and contraction.
CoarseLevel coarsen_once(const WeightedGraph& g, std::uint64_t seed);

std::int64_t weighted_cut(const WeightedGraph& g, const std::vector<Index>& part);

// Greedy boundary FM passes; only strictly improving or tie-and-rebalancing
// moves are taken, so the cut never increases. Returns the cut after each pass
// (element 0 is the starting cut).
std::vector<std::int64_t> refine_kway(const WeightedGraph& g, std::vector<Index>& part,
                                      std::size_t c, std::int64_t max_part_weight,
                                      int max_passes);

}  // namespace detail

}  // namespace cgcn
