#pragma once

#include <cstdint>
#include <vector>

#include "cgcn/dataset.hpp"
#include "cgcn/rng.hpp"
#include "cgcn/sparse.hpp"

namespace cgcn::synth {

struct BlockGraph {
  std::vector<Edge> edges;
  std::vector<Index> block;
  std::size_t n = 0;
};

// Stochastic block model: every pair is linked independently with p_in inside
// a block and p_out across blocks.
BlockGraph sbm(const std::vector<std::size_t>& block_sizes, double p_in, double p_out,
               std::uint64_t seed);

std::vector<Edge> erdos_renyi(std::size_t n, double p, std::uint64_t seed);

// Uniform-ish simple d-regular graph via the pairing model with restarts.
std::vector<Edge> random_regular(std::size_t n, std::size_t d, std::uint64_t seed);

// Two K_k cliques (nodes [0,k) and [k,2k)) joined by the edge (k-1, k).
std::vector<Edge> two_cliques_bridge(std::size_t k);

double standard_normal(Rng& rng);

struct SbmDatasetSpec {
  std::vector<std::size_t> block_sizes{100, 100};
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t n_features = 8;
  double signal = 1.0;  // added to feature (block mod n_features)
  double noise = 1.0;   // std of the Gaussian noise on every feature
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  std::uint64_t seed = 1;
};

// Multiclass dataset whose labels are the SBM blocks.
Dataset sbm_dataset(const SbmDatasetSpec& spec);

}  // namespace cgcn::synth
