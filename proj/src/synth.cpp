#include "cgcn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "cgcn/error.hpp"

namespace cgcn::synth {

BlockGraph sbm(const std::vector<std::size_t>& block_sizes, double p_in, double p_out,
               std::uint64_t seed) {
  BlockGraph g;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    g.block.insert(g.block.end(), block_sizes[b], static_cast<Index>(b));
  }
  g.n = g.block.size();
  Rng rng(seed);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = i + 1; j < g.n; ++j) {
      const double p = g.block[i] == g.block[j] ? p_in : p_out;
      if (uniform01(rng) < p) g.edges.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return g;
}

std::vector<Edge> erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  std::vector<Edge> edges;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform01(rng) < p) edges.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return edges;
}

std::vector<Edge> random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if ((n * d) % 2 != 0 || d >= n) throw InputError("random_regular: need n*d even and d < n");
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Index> stubs;
    for (std::size_t v = 0; v < n; ++v) stubs.insert(stubs.end(), d, static_cast<Index>(v));
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[uniform_index(rng, i)]);
    std::set<Edge> seen;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      const Index u = std::min(stubs[i], stubs[i + 1]);
      const Index v = std::max(stubs[i], stubs[i + 1]);
      ok = u != v && seen.insert({u, v}).second;
    }
    if (ok) return {seen.begin(), seen.end()};
  }
  throw InputError("random_regular: pairing model did not produce a simple graph");
}

std::vector<Edge> two_cliques_bridge(std::size_t k) {
  std::vector<Edge> edges;
  for (std::size_t off : {std::size_t{0}, k}) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        edges.emplace_back(static_cast<Index>(off + i), static_cast<Index>(off + j));
      }
    }
  }
  edges.emplace_back(static_cast<Index>(k - 1), static_cast<Index>(k));
  return edges;
}

double standard_normal(Rng& rng) {
  // Box-Muller; u1 in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Dataset sbm_dataset(const SbmDatasetSpec& spec) {
  const BlockGraph g = sbm(spec.block_sizes, spec.p_in, spec.p_out, derive_seed(spec.seed, 1));
  Dataset ds;
  ds.graph = from_edges(g.edges, g.n);
  ds.labels.task = Task::kMulticlass;
  ds.labels.n_classes = spec.block_sizes.size();
  for (Index b : g.block) ds.labels.ids.push_back({b});

  Rng rng(derive_seed(spec.seed, 2));
  ds.features = DenseMatrix(g.n, spec.n_features);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < spec.n_features; ++j) ds.features(i, j) = spec.noise * standard_normal(rng);
    ds.features(i, static_cast<std::size_t>(g.block[i]) % spec.n_features) += spec.signal;
  }

  std::vector<Index> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(spec.seed, 3));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(split_rng, i)]);
  const auto n_train = static_cast<std::size_t>(spec.train_fraction * static_cast<double>(g.n));
  const auto n_val = static_cast<std::size_t>(spec.val_fraction * static_cast<double>(g.n));
  ds.splits.train.assign(order.begin(), order.begin() + n_train);
  ds.splits.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  ds.splits.test.assign(order.begin() + n_train + n_val, order.end());
  for (auto* s : {&ds.splits.train, &ds.splits.val, &ds.splits.test}) std::sort(s->begin(), s->end());
  ds.validate();
  return ds;
}

}  // namespace cgcn::synth
