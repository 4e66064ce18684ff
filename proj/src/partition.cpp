#include "cgcn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "cgcn/error.hpp"
#include "cgcn/rng.hpp"

namespace cgcn {

// ---------------------------------------------------------------------------
// Partition container

Partition Partition::from_assignment(std::vector<Index> assignment, std::size_t n_clusters) {
  Partition p;
  p.n_clusters = n_clusters;
  p.clusters.assign(n_clusters, {});
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    const Index t = assignment[v];
    if (t < 0 || static_cast<std::size_t>(t) >= n_clusters) {
      throw InputError("partition: node " + std::to_string(v) + " has cluster id " +
                       std::to_string(t) + " outside [0," + std::to_string(n_clusters) + ")");
    }
    p.clusters[t].push_back(static_cast<Index>(v));
  }
  for (std::size_t t = 0; t < n_clusters; ++t) {
    if (p.clusters[t].empty()) throw InputError("partition: cluster " + std::to_string(t) + " is empty");
  }
  p.assignment = std::move(assignment);
  return p;
}

void Partition::validate() const {
  if (clusters.size() != n_clusters) throw InputError("partition: cluster list size mismatch");
  std::size_t covered = 0;
  for (std::size_t t = 0; t < n_clusters; ++t) {
    if (clusters[t].empty()) throw InputError("partition: cluster " + std::to_string(t) + " is empty");
    if (!std::is_sorted(clusters[t].begin(), clusters[t].end())) {
      throw InputError("partition: cluster " + std::to_string(t) + " is not sorted");
    }
    for (Index v : clusters[t]) {
      if (v < 0 || static_cast<std::size_t>(v) >= assignment.size() ||
          assignment[v] != static_cast<Index>(t)) {
        throw InputError("partition: cluster lists disagree with assignment");
      }
    }
    covered += clusters[t].size();
  }
  if (covered != assignment.size()) throw InputError("partition: clusters do not cover all nodes");
}

std::size_t hard_cluster_cap(std::size_t n, std::size_t c) {
  const std::size_t ceil_avg = (n + c - 1) / c;
  const auto soft = static_cast<std::size_t>(std::floor(1.3 * static_cast<double>(n) / static_cast<double>(c)));
  return std::max(ceil_avg, soft);
}

namespace {

void check_cluster_count(std::size_t n, std::size_t c) {
  if (c < 1) throw InputError("cluster count must be at least 1");
  if (c > n) {
    throw InputError("cluster count " + std::to_string(c) + " exceeds node count " + std::to_string(n));
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Multilevel internals

namespace detail {

std::int64_t WeightedGraph::total_edge_weight() const {
  return std::accumulate(adjwgt.begin(), adjwgt.end(), std::int64_t{0}) / 2;
}

WeightedGraph from_adjacency(const SparseMatrix& a) {
  WeightedGraph g;
  g.vwgt.assign(a.n_rows, 1);
  g.xadj.assign(a.n_rows + 1, 0);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (Index c : a.row_cols(r)) {
      if (static_cast<std::size_t>(c) == r) continue;
      g.adjncy.push_back(c);
      g.adjwgt.push_back(1);
    }
    g.xadj[r + 1] = static_cast<std::int64_t>(g.adjncy.size());
  }
  return g;
}

namespace {

CoarseLevel contract(const WeightedGraph& g, const std::vector<Index>& match) {
  const std::size_t n = g.n();
  CoarseLevel level;
  level.fine_to_coarse.assign(n, -1);
  Index next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (level.fine_to_coarse[v] != -1) continue;
    level.fine_to_coarse[v] = next;
    level.fine_to_coarse[match[v]] = next;
    ++next;
  }
  const auto cn = static_cast<std::size_t>(next);
  WeightedGraph& cg = level.graph;
  cg.vwgt.assign(cn, 0);
  cg.xadj.assign(cn + 1, 0);
  cg.collapsed = g.collapsed;

  std::vector<std::vector<Index>> members(cn);
  for (std::size_t v = 0; v < n; ++v) {
    members[level.fine_to_coarse[v]].push_back(static_cast<Index>(v));
    cg.vwgt[level.fine_to_coarse[v]] += g.vwgt[v];
  }
  std::vector<std::int64_t> acc(cn, 0);
  std::vector<Index> touched;
  for (std::size_t cv = 0; cv < cn; ++cv) {
    touched.clear();
    for (Index v : members[cv]) {
      for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
        const Index cu = level.fine_to_coarse[g.adjncy[k]];
        if (static_cast<std::size_t>(cu) == cv) {
          // Each internal edge is seen from both endpoints.
          cg.collapsed += g.adjwgt[k];
          continue;
        }
        if (acc[cu] == 0) touched.push_back(cu);
        acc[cu] += g.adjwgt[k];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index cu : touched) {
      cg.adjncy.push_back(cu);
      cg.adjwgt.push_back(acc[cu]);
      acc[cu] = 0;
    }
    cg.xadj[cv + 1] = static_cast<std::int64_t>(cg.adjncy.size());
  }
  // Internal edges were double counted above.
  cg.collapsed = g.collapsed + (cg.collapsed - g.collapsed) / 2;
  return level;
}

}  // namespace

CoarseLevel coarsen_once(const WeightedGraph& g, std::uint64_t seed) {
  const std::size_t n = g.n();
  const std::int64_t total_vwgt = std::accumulate(g.vwgt.begin(), g.vwgt.end(), std::int64_t{0});
  // Keeps coarse vertices small enough that balanced partitions stay reachable.
  const std::int64_t max_vwgt = std::max<std::int64_t>(2, total_vwgt / 20 + 1);

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);

  std::vector<Index> match(n, -1);
  for (Index v : order) {
    if (match[v] != -1) continue;
    Index best = -1;
    std::int64_t best_w = -1;
    for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
      const Index u = g.adjncy[k];
      if (u == v || match[u] != -1) continue;
      if (g.vwgt[u] + g.vwgt[v] > max_vwgt) continue;
      const std::int64_t w = g.adjwgt[k];
      if (w > best_w || (w == best_w && u < best)) {
        best = u;
        best_w = w;
      }
    }
    if (best == -1) {
      match[v] = v;
    } else {
      match[v] = best;
      match[best] = v;
    }
  }
  return contract(g, match);
}

std::int64_t weighted_cut(const WeightedGraph& g, const std::vector<Index>& part) {
  std::int64_t cut = 0;
  for (std::size_t v = 0; v < g.n(); ++v) {
    for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
      if (part[v] != part[g.adjncy[k]]) cut += g.adjwgt[k];
    }
  }
  return cut / 2;
}

namespace {

// Connectivity of v to every part it touches.
void connectivity(const WeightedGraph& g, const std::vector<Index>& part, Index v,
                  std::vector<std::int64_t>& conn, std::vector<Index>& parts) {
  for (Index p : parts) conn[p] = 0;
  parts.clear();
  for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
    const Index p = part[g.adjncy[k]];
    if (conn[p] == 0) parts.push_back(p);
    conn[p] += g.adjwgt[k];
  }
}

struct Move {
  std::int64_t gain;
  Index target;
};

// Best admissible move for v; target -1 when v has no neighbouring part with room.
Move best_move(const WeightedGraph& g, const std::vector<Index>& part,
               const std::vector<std::int64_t>& pweight, const std::vector<std::int64_t>& pcount,
               std::int64_t max_part_weight, Index v, std::vector<std::int64_t>& conn,
               std::vector<Index>& parts) {
  connectivity(g, part, v, conn, parts);
  const Index from = part[v];
  const std::int64_t internal = conn[from];
  Move best{0, -1};
  if (pcount[from] <= 1) return best;
  std::sort(parts.begin(), parts.end());
  for (Index p : parts) {
    if (p == from || conn[p] == 0) continue;
    if (pweight[p] + g.vwgt[v] > max_part_weight) continue;
    const std::int64_t gain = conn[p] - internal;
    if (best.target == -1 || gain > best.gain ||
        (gain == best.gain && pweight[p] < pweight[best.target])) {
      best = {gain, p};
    }
  }
  return best;
}

}  // namespace

std::vector<std::int64_t> refine_kway(const WeightedGraph& g, std::vector<Index>& part,
                                      std::size_t c, std::int64_t max_part_weight,
                                      int max_passes) {
  const std::size_t n = g.n();
  std::vector<std::int64_t> pweight(c, 0), pcount(c, 0);
  for (std::size_t v = 0; v < n; ++v) {
    pweight[part[v]] += g.vwgt[v];
    pcount[part[v]] += 1;
  }
  std::vector<std::int64_t> conn(c, 0);
  std::vector<Index> parts;
  std::vector<std::int64_t> history{weighted_cut(g, part)};
  std::int64_t cut = history.back();
  // Consecutive non-improving moves tolerated before a pass ends.
  const std::size_t patience = std::max<std::size_t>(25, n / 50);

  for (int pass = 0; pass < max_passes; ++pass) {
    // Ordered by (gain desc, vertex asc).
    using Key = std::pair<std::int64_t, Index>;
    std::set<Key> queue;
    std::vector<std::int64_t> key_gain(n, 0);
    std::vector<char> queued(n, 0), locked(n, 0);

    auto enqueue = [&](Index v) {
      if (locked[v]) return;
      if (queued[v]) {
        queue.erase({-key_gain[v], v});
        queued[v] = 0;
      }
      const Move m = best_move(g, part, pweight, pcount, max_part_weight, v, conn, parts);
      if (m.target == -1) return;
      key_gain[v] = m.gain;
      queue.insert({-m.gain, v});
      queued[v] = 1;
    };
    for (std::size_t v = 0; v < n; ++v) {
      bool boundary = false;
      for (auto k = g.xadj[v]; k < g.xadj[v + 1] && !boundary; ++k) {
        boundary = part[g.adjncy[k]] != part[v];
      }
      if (boundary) enqueue(static_cast<Index>(v));
    }

    struct Done {
      Index v;
      Index from;
    };
    std::vector<Done> moves;
    std::int64_t best_cut = cut;
    std::size_t best_len = 0;
    std::int64_t best_spread = *std::max_element(pweight.begin(), pweight.end());
    std::size_t since_best = 0;

    while (!queue.empty() && since_best < patience) {
      const Index v = queue.begin()->second;
      queue.erase(queue.begin());
      queued[v] = 0;
      const Move m = best_move(g, part, pweight, pcount, max_part_weight, v, conn, parts);
      if (m.target == -1) continue;
      if (m.gain != key_gain[v]) {
        key_gain[v] = m.gain;
        queue.insert({-m.gain, v});
        queued[v] = 1;
        continue;
      }
      const Index from = part[v];
      part[v] = m.target;
      pweight[from] -= g.vwgt[v];
      pcount[from] -= 1;
      pweight[m.target] += g.vwgt[v];
      pcount[m.target] += 1;
      cut -= m.gain;
      locked[v] = 1;
      moves.push_back({v, from});
      const std::int64_t spread = *std::max_element(pweight.begin(), pweight.end());
      if (cut < best_cut || (cut == best_cut && spread < best_spread)) {
        best_cut = cut;
        best_len = moves.size();
        best_spread = spread;
        since_best = 0;
      } else {
        ++since_best;
      }
      for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) enqueue(g.adjncy[k]);
    }
    // Roll back to the best prefix.
    for (std::size_t i = moves.size(); i > best_len; --i) {
      const auto [v, from] = moves[i - 1];
      const Index to = part[v];
      part[v] = from;
      pweight[to] -= g.vwgt[v];
      pcount[to] -= 1;
      pweight[from] += g.vwgt[v];
      pcount[from] += 1;
    }
    cut = best_cut;
    history.push_back(cut);
    if (best_len == 0) break;
  }
  return history;
}

namespace {

// Induced subgraph on `verts` (ascending global ids).
WeightedGraph induced(const WeightedGraph& g, const std::vector<Index>& verts,
                      std::vector<Index>& local) {
  WeightedGraph s;
  for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<Index>(i);
  s.xadj.assign(verts.size() + 1, 0);
  s.vwgt.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Index v = verts[i];
    s.vwgt.push_back(g.vwgt[v]);
    for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
      const Index l = local[g.adjncy[k]];
      if (l < 0) continue;
      s.adjncy.push_back(l);
      s.adjwgt.push_back(g.adjwgt[k]);
    }
    s.xadj[i + 1] = static_cast<std::int64_t>(s.adjncy.size());
  }
  for (Index v : verts) local[v] = -1;
  return s;
}

// Greedy region growing from a seed: repeatedly absorb the frontier vertex with
// the largest (edges into region - edges out) until side 0 reaches its target.
std::vector<Index> grow_region(const WeightedGraph& g, std::int64_t target, std::size_t min0,
                               std::size_t min1, Rng& rng) {
  const std::size_t n = g.n();
  std::vector<Index> side(n, 1);
  std::vector<std::int64_t> gain(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) gain[v] -= g.adjwgt[k];
  }
  std::set<std::pair<std::int64_t, Index>> frontier;  // (-gain, v)
  std::vector<char> in_frontier(n, 0);
  std::int64_t weight = 0;
  std::size_t count = 0;

  auto absorb = [&](Index v) {
    side[v] = 0;
    weight += g.vwgt[v];
    ++count;
    for (auto k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
      const Index u = g.adjncy[k];
      if (side[u] == 0) continue;
      if (in_frontier[u]) frontier.erase({-gain[u], u});
      gain[u] += 2 * g.adjwgt[k];
      frontier.insert({-gain[u], u});
      in_frontier[u] = 1;
    }
  };

  while (count < n - min1 && (weight < target || count < min0)) {
    Index next = -1;
    while (!frontier.empty()) {
      const Index u = frontier.begin()->second;
      frontier.erase(frontier.begin());
      in_frontier[u] = 0;
      if (side[u] == 1) {
        next = u;
        break;
      }
    }
    if (next == -1) {
      // Disconnected remainder: restart from a random unassigned vertex.
      std::vector<Index> rest;
      for (std::size_t v = 0; v < n; ++v) {
        if (side[v] == 1) rest.push_back(static_cast<Index>(v));
      }
      next = rest[uniform_index(rng, rest.size())];
    }
    // Stop short when absorbing would overshoot more than stopping undershoots.
    if (count >= min0 && weight + g.vwgt[next] - target > target - weight) break;
    absorb(next);
  }
  return side;
}

void recursive_bisect(const WeightedGraph& g, const std::vector<Index>& verts, Index first_part,
                      std::size_t k, std::vector<Index>& out, std::vector<Index>& local, Rng& rng) {
  if (k == 1) {
    for (Index v : verts) out[v] = first_part;
    return;
  }
  const std::size_t k0 = k / 2;
  const std::size_t k1 = k - k0;
  const WeightedGraph s = induced(g, verts, local);
  const std::int64_t total = std::accumulate(s.vwgt.begin(), s.vwgt.end(), std::int64_t{0});
  const auto target0 = static_cast<std::int64_t>(
      std::llround(static_cast<double>(total) * static_cast<double>(k0) / static_cast<double>(k)));
  const std::int64_t max_vw = *std::max_element(s.vwgt.begin(), s.vwgt.end());
  const std::int64_t limit = static_cast<std::int64_t>(
      std::ceil(1.03 * static_cast<double>(std::max(target0, total - target0)))) + max_vw;

  std::vector<Index> best;
  std::int64_t best_cut = -1;
  const int trials = 8;
  for (int t = 0; t < trials; ++t) {
    std::vector<Index> side = grow_region(s, target0, k0, k1, rng);
    // Two-way refinement keeping each side large enough for its sub-parts.
    std::vector<std::int64_t> pc(2, 0);
    for (Index x : side) ++pc[x];
    if (static_cast<std::size_t>(pc[0]) > k0 && static_cast<std::size_t>(pc[1]) > k1) {
      refine_kway(s, side, 2, limit, 4);
    }
    pc.assign(2, 0);
    for (Index x : side) ++pc[x];
    if (static_cast<std::size_t>(pc[0]) < k0 || static_cast<std::size_t>(pc[1]) < k1) continue;
    const std::int64_t cut = weighted_cut(s, side);
    if (best_cut < 0 || cut < best_cut) {
      best_cut = cut;
      best = side;
    }
  }
  if (best.empty()) {
    // Degenerate: split by position so both halves can hold their parts.
    best.assign(s.n(), 1);
    for (std::size_t i = 0; i < k0 * s.n() / k && i < s.n(); ++i) best[i] = 0;
  }
  std::vector<Index> left, right;
  for (std::size_t i = 0; i < verts.size(); ++i) (best[i] == 0 ? left : right).push_back(verts[i]);
  recursive_bisect(g, left, first_part, k0, out, local, rng);
  recursive_bisect(g, right, first_part + static_cast<Index>(k0), k1, out, local, rng);
}

// Enforces non-empty clusters and the hard size cap on the finest graph.
void rebalance(const WeightedGraph& g, std::vector<Index>& part, std::size_t c, std::size_t cap) {
  const std::size_t n = g.n();
  std::vector<std::int64_t> size(c, 0);
  for (Index p : part) ++size[p];
  std::vector<std::int64_t> conn(c, 0);
  std::vector<Index> parts;

  // Cheapest vertex to pull out of `from`, preferring targets in `allowed`.
  auto pick = [&](Index from, auto&& target_of) {
    Index best_v = -1, best_t = -1;
    std::int64_t best_gain = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (part[v] != from) continue;
      connectivity(g, part, static_cast<Index>(v), conn, parts);
      const Index t = target_of(static_cast<Index>(v));
      if (t < 0) continue;
      const std::int64_t gain = conn[t] - conn[from];
      if (best_v == -1 || gain > best_gain) {
        best_v = static_cast<Index>(v);
        best_t = t;
        best_gain = gain;
      }
    }
    return std::pair{best_v, best_t};
  };
  auto move = [&](Index v, Index t) {
    --size[part[v]];
    ++size[t];
    part[v] = t;
  };

  for (std::size_t e = 0; e < c; ++e) {
    if (size[e] != 0) continue;
    const auto from = static_cast<Index>(std::max_element(size.begin(), size.end()) - size.begin());
    const auto [v, t] = pick(from, [&](Index) { return static_cast<Index>(e); });
    move(v, t);
  }
  for (std::size_t p = 0; p < c; ++p) {
    while (static_cast<std::size_t>(size[p]) > cap) {
      const auto [v, t] = pick(static_cast<Index>(p), [&](Index) {
        // Neighbouring cluster with room, else the smallest cluster.
        Index t = -1;
        for (Index q : parts) {
          if (q == static_cast<Index>(p) || static_cast<std::size_t>(size[q]) >= cap) continue;
          if (t == -1 || conn[q] > conn[t] || (conn[q] == conn[t] && q < t)) t = q;
        }
        if (t == -1) t = static_cast<Index>(std::min_element(size.begin(), size.end()) - size.begin());
        return t;
      });
      move(v, t);
    }
  }
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// Public partitioners

Partition metis_like_partition(const SparseMatrix& a, std::size_t c, std::uint64_t seed) {
  if (a.n_rows != a.n_cols) throw InputError("metis_like_partition: adjacency must be square");
  const std::size_t n = a.n_rows;
  check_cluster_count(n, c);
  if (c == 1) return Partition::from_assignment(std::vector<Index>(n, 0), 1);
  if (c == n) {
    std::vector<Index> id(n);
    std::iota(id.begin(), id.end(), 0);
    return Partition::from_assignment(std::move(id), c);
  }

  using detail::CoarseLevel;
  using detail::WeightedGraph;
  const std::size_t stop = std::max<std::size_t>(2 * c, 100);
  std::vector<CoarseLevel> levels;
  WeightedGraph current = detail::from_adjacency(a);
  std::uint64_t level_no = 0;
  while (current.n() > stop) {
    CoarseLevel next = detail::coarsen_once(current, derive_seed(seed, 100, level_no++));
    // Stalled matching: stop coarsening.
    if (next.graph.n() * 20 > current.n() * 19) break;
    WeightedGraph coarse = next.graph;
    levels.push_back(std::move(next));
    current = std::move(coarse);
  }

  Rng rng(derive_seed(seed, 200));
  std::vector<Index> part(current.n(), 0);
  std::vector<Index> all(current.n());
  std::iota(all.begin(), all.end(), 0);
  std::vector<Index> local(current.n(), -1);
  detail::recursive_bisect(current, all, 0, c, part, local, rng);

  auto soft_limit = [&](const WeightedGraph& g) {
    const std::int64_t total = std::accumulate(g.vwgt.begin(), g.vwgt.end(), std::int64_t{0});
    const std::int64_t max_vw = *std::max_element(g.vwgt.begin(), g.vwgt.end());
    const auto ceil_avg = static_cast<std::int64_t>((total + static_cast<std::int64_t>(c) - 1) /
                                                    static_cast<std::int64_t>(c));
    const auto soft = static_cast<std::int64_t>(
        std::floor(1.05 * static_cast<double>(total) / static_cast<double>(c)));
    return std::max(soft, ceil_avg + max_vw - 1);
  };
  detail::refine_kway(current, part, c, soft_limit(current), 8);

  // Project back through the hierarchy, refining at each finer level.
  for (std::size_t i = levels.size(); i-- > 0;) {
    const WeightedGraph& finer = i == 0 ? detail::from_adjacency(a) : levels[i - 1].graph;
    std::vector<Index> fine_part(finer.n());
    for (std::size_t v = 0; v < finer.n(); ++v) fine_part[v] = part[levels[i].fine_to_coarse[v]];
    part = std::move(fine_part);
    if (i > 0) detail::refine_kway(finer, part, c, soft_limit(finer), 8);
  }

  const WeightedGraph fine = detail::from_adjacency(a);
  if (!levels.empty()) detail::refine_kway(fine, part, c, soft_limit(fine), 8);
  detail::rebalance(fine, part, c, hard_cluster_cap(n, c));
  detail::refine_kway(fine, part, c, static_cast<std::int64_t>(hard_cluster_cap(n, c)), 4);
  return Partition::from_assignment(std::move(part), c);
}

Partition random_partition(std::size_t n, std::size_t c, std::uint64_t seed) {
  check_cluster_count(n, c);
  Rng rng(seed);
  std::vector<Index> assignment(n);
  std::vector<std::size_t> size(c, 0);
  for (auto& t : assignment) {
    t = static_cast<Index>(uniform_index(rng, c));
    ++size[t];
  }
  for (std::size_t e = 0; e < c; ++e) {
    if (size[e] != 0) continue;
    const auto from = static_cast<Index>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<Index> members;
    for (std::size_t v = 0; v < n; ++v) {
      if (assignment[v] == from) members.push_back(static_cast<Index>(v));
    }
    const Index v = members[uniform_index(rng, members.size())];
    assignment[v] = static_cast<Index>(e);
    --size[from];
    ++size[e];
  }
  return Partition::from_assignment(std::move(assignment), c);
}

PartitionQuality quality(const SparseMatrix& a, const Partition& p, const LabelTable* labels) {
  if (p.assignment.size() != a.n_rows) {
    throw InputError("quality: partition covers " + std::to_string(p.assignment.size()) +
                     " nodes but graph has " + std::to_string(a.n_rows));
  }
  PartitionQuality q;
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (Index c : a.row_cols(r)) {
      if (static_cast<std::size_t>(c) <= r) continue;
      if (p.assignment[r] == p.assignment[c]) {
        ++q.within_edges;
      } else {
        ++q.edge_cut;
      }
    }
  }
  const std::size_t total = q.within_edges + q.edge_cut;
  q.within_fraction = total == 0 ? 1.0 : static_cast<double>(q.within_edges) / static_cast<double>(total);
  std::size_t largest = 0;
  for (const auto& cl : p.clusters) largest = std::max(largest, cl.size());
  q.balance = static_cast<double>(largest) * static_cast<double>(p.n_clusters) /
              static_cast<double>(std::max<std::size_t>(1, p.n_nodes()));
  if (labels != nullptr) {
    if (labels->size() != a.n_rows) throw InputError("quality: label table size mismatch");
    for (const auto& cl : p.clusters) q.label_entropy.push_back(label_entropy(*labels, cl));
  }
  return q;
}

void write_partition(const Partition& p, const std::filesystem::path& path) {
  std::ostringstream out;
  for (std::size_t v = 0; v < p.assignment.size(); ++v) out << v << '\t' << p.assignment[v] << '\n';
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InputError("cannot write " + tmp.string());
    f << out.str();
  }
  std::filesystem::rename(tmp, path);
}

Partition read_partition(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open partition file " + path.string());
  std::vector<Index> assignment;
  std::string line;
  std::size_t line_no = 0;
  Index max_cluster = -1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long node = -1, cluster = -1;
    std::string rest;
    if (!(ls >> node >> cluster) || (ls >> rest) || line.find('\t') == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected '<node_id>\\t<cluster_id>'");
    }
    if (node != static_cast<long long>(assignment.size())) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected node " +
                       std::to_string(assignment.size()) + ", got " + std::to_string(node));
    }
    if (cluster < 0) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": negative cluster id");
    }
    assignment.push_back(static_cast<Index>(cluster));
    max_cluster = std::max(max_cluster, static_cast<Index>(cluster));
  }
  if (assignment.empty()) throw InputError("partition file " + path.string() + " is empty");
  return Partition::from_assignment(std::move(assignment), static_cast<std::size_t>(max_cluster + 1));
}

}  // namespace cgcn
