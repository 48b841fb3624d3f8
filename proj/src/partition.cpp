#include "gad/partition.hpp"

#include "gad/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>

namespace gad {

CoarseGraph::CoarseGraph(std::vector<Weight> node_weights, std::span<const WeightedEdge> edges,
                         std::vector<NodeId> fine_to_coarse)
    : node_weight_(std::move(node_weights)), fine_to_coarse_(std::move(fine_to_coarse)) {
  const auto n = static_cast<NodeId>(node_weight_.size());
  std::vector<WeightedEdge> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw std::out_of_range("coarse edge endpoint out of range");
    if (e.u == e.v) continue;
    directed.push_back(e);
    directed.push_back({e.v, e.u, e.w});
  }
  std::sort(directed.begin(), directed.end(), [](const auto& a, const auto& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < directed.size(); ++i) {
    const auto& e = directed[i];
    if (!targets_.empty() && i > 0 && directed[i - 1].u == e.u && directed[i - 1].v == e.v) {
      weights_.back() += e.w;
      continue;
    }
    ++offsets_[e.u + 1];
    targets_.push_back(e.v);
    weights_.push_back(e.w);
  }
  for (NodeId v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
}

CoarseGraph CoarseGraph::from_graph(const Graph& g) {
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(g.num_edges()));
  for (const Edge& e : g.edge_list()) edges.push_back({e.u, e.v, 1});
  return CoarseGraph(std::vector<Weight>(static_cast<std::size_t>(g.num_nodes()), 1), edges);
}

Weight CoarseGraph::total_node_weight() const {
  return std::accumulate(node_weight_.begin(), node_weight_.end(), Weight{0});
}

Weight CoarseGraph::edge_weight(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return 0;
  return edge_weights(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

Weight balance_cap(Weight total, int k, double epsilon) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  const Weight per_part = (total + k - 1) / k;
  // The small slack keeps products like 1.1 * 10 from rounding below 11.
  return static_cast<Weight>(std::floor((1.0 + epsilon) * static_cast<double>(per_part) + 1e-9));
}

std::vector<NodeId> heavy_edge_matching(const CoarseGraph& level, std::span<const NodeId> order,
                                        Weight max_node_weight) {
  std::vector<NodeId> mate(static_cast<std::size_t>(level.num_nodes()), -1);
  for (NodeId u : order) {
    if (mate[u] >= 0) continue;
    NodeId best = -1;
    Weight best_w = -1;
    const auto nbrs = level.neighbors(u);
    const auto ws = level.edge_weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const NodeId v = nbrs[i];
      if (mate[v] >= 0) continue;
      if (level.node_weight(u) + level.node_weight(v) > max_node_weight) continue;
      if (ws[i] > best_w || (ws[i] == best_w && v < best)) {
        best = v;
        best_w = ws[i];
      }
    }
    if (best >= 0) {
      mate[u] = best;
      mate[best] = u;
    } else {
      mate[u] = u;
    }
  }
  for (NodeId v = 0; v < level.num_nodes(); ++v)
    if (mate[v] < 0) mate[v] = v;
  return mate;
}

CoarseGraph contract(const CoarseGraph& level, std::span<const NodeId> mate) {
  const NodeId n = level.num_nodes();
  std::vector<NodeId> map(static_cast<std::size_t>(n), -1);
  NodeId next = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (map[v] >= 0) continue;
    map[v] = next;
    map[mate[v]] = next;
    ++next;
  }
  std::vector<Weight> weights(static_cast<std::size_t>(next), 0);
  for (NodeId v = 0; v < n; ++v) weights[map[v]] += level.node_weight(v);

  std::vector<CoarseGraph::WeightedEdge> edges;
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = level.neighbors(u);
    const auto ws = level.edge_weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      if (u < nbrs[i] && map[u] != map[nbrs[i]]) edges.push_back({map[u], map[nbrs[i]], ws[i]});
  }
  return CoarseGraph(std::move(weights), edges, std::move(map));
}

std::vector<CoarseGraph> coarsen(const CoarseGraph& base, const CoarsenOptions& options) {
  if (!(options.target_fraction > 0.0 && options.target_fraction < 1.0))
    throw std::invalid_argument("target_fraction must be in (0, 1)");
  std::vector<CoarseGraph> levels;
  const double target = options.target_fraction * static_cast<double>(base.num_nodes());
  const CoarseGraph* current = &base;
  for (std::uint64_t depth = 0;; ++depth) {
    const NodeId n = current->num_nodes();
    if (static_cast<double>(n) <= target) break;
    std::vector<NodeId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(options.seed, "coarsen", depth);
    std::shuffle(order.begin(), order.end(), rng);
    const auto mate = heavy_edge_matching(*current, order, options.max_node_weight);
    CoarseGraph next = contract(*current, mate);
    const NodeId m = next.num_nodes();
    if (static_cast<double>(m) > (1.0 - options.min_shrink) * static_cast<double>(n)) break;
    if (m < options.min_nodes) break;
    levels.push_back(std::move(next));
    current = &levels.back();
  }
  return levels;
}

Weight weighted_cut(const CoarseGraph& cg, std::span<const int> assignment) {
  Weight cut = 0;
  for (NodeId u = 0; u < cg.num_nodes(); ++u) {
    const auto nbrs = cg.neighbors(u);
    const auto ws = cg.edge_weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      if (u < nbrs[i] && assignment[u] != assignment[nbrs[i]]) cut += ws[i];
  }
  return cut;
}

namespace {

CoarsePartition grow_regions(const CoarseGraph& cg, int k, Weight cap, Rng& rng) {
  const NodeId n = cg.num_nodes();
  CoarsePartition out;
  out.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<Weight> part_weight(static_cast<std::size_t>(k), 0);

  // k distinct seeds by partial Fisher-Yates.
  std::vector<NodeId> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int p = 0; p < k; ++p) {
    std::uniform_int_distribution<NodeId> pick(p, n - 1);
    std::swap(pool[p], pool[pick(rng)]);
  }

  // Frontier ordered by (heaviest connecting edge, lowest id).
  using Entry = std::pair<Weight, NodeId>;
  std::vector<std::set<Entry>> frontier(static_cast<std::size_t>(k));
  std::vector<std::unordered_map<NodeId, Weight>> best(static_cast<std::size_t>(k));
  auto claim = [&](int p, NodeId v) {
    out.assignment[v] = p;
    part_weight[p] += cg.node_weight(v);
    const auto nbrs = cg.neighbors(v);
    const auto ws = cg.edge_weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const NodeId w = nbrs[i];
      if (out.assignment[w] >= 0) continue;
      auto [it, fresh] = best[p].emplace(w, ws[i]);
      if (!fresh) {
        if (ws[i] <= it->second) continue;
        frontier[p].erase({-it->second, w});
        it->second = ws[i];
      }
      frontier[p].insert({-ws[i], w});
    }
  };
  for (int p = 0; p < k; ++p) claim(p, pool[p]);

  std::vector<bool> open(static_cast<std::size_t>(k), true);
  for (bool progress = true; progress;) {
    progress = false;
    for (int p = 0; p < k; ++p) {
      if (!open[p]) continue;
      NodeId next = -1;
      while (!frontier[p].empty()) {
        const NodeId v = frontier[p].begin()->second;
        if (out.assignment[v] < 0) {
          next = v;
          break;
        }
        frontier[p].erase(frontier[p].begin());
      }
      if (next < 0 || part_weight[p] + cg.node_weight(next) > cap) {
        open[p] = false;
        continue;
      }
      frontier[p].erase(frontier[p].begin());
      claim(p, next);
      progress = true;
    }
  }

  // Orphans join the lightest adjacent part; repeated because an orphan may
  // only touch other orphans until they are placed.
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v = 0; v < n; ++v) {
      if (out.assignment[v] >= 0) continue;
      int target = -1;
      for (NodeId w : cg.neighbors(v)) {
        const int q = out.assignment[w];
        if (q < 0) continue;
        if (target < 0 || part_weight[q] < part_weight[target] ||
            (part_weight[q] == part_weight[target] && q < target))
          target = q;
      }
      if (target < 0) continue;
      out.assignment[v] = target;
      part_weight[target] += cg.node_weight(v);
      changed = true;
    }
  }
  NodeId stranded = 0;
  Weight stranded_weight = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (out.assignment[v] >= 0) continue;
    const int lightest = static_cast<int>(
        std::min_element(part_weight.begin(), part_weight.end()) - part_weight.begin());
    out.assignment[v] = lightest;
    part_weight[lightest] += cg.node_weight(v);
    ++stranded;
    stranded_weight += cg.node_weight(v);
  }
  if (stranded > 0)
    out.warnings.push_back(std::to_string(stranded) + " coarse nodes (" +
                           std::to_string(stranded_weight) +
                           " original nodes) unreachable from any part, assigned to the lightest parts");
  out.cut = weighted_cut(cg, out.assignment);
  return out;
}

}  // namespace

std::vector<CoarsePartition> restart_candidates(const CoarseGraph& cg, int k, double epsilon,
                                                int restarts, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (k > cg.num_nodes())
    throw std::invalid_argument("k exceeds the number of nodes at the coarsest level");
  const Weight total = cg.total_node_weight();
  const Weight cap = balance_cap(total, k, epsilon);
  if (static_cast<Weight>(k) * cap < total)
    throw InfeasibleBalance("k * cap = " + std::to_string(static_cast<Weight>(k) * cap) +
                            " < total node weight " + std::to_string(total));

  std::vector<CoarsePartition> out;
  out.reserve(static_cast<std::size_t>(restarts));
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, "restart", static_cast<std::uint64_t>(r));
    out.push_back(grow_regions(cg, k, cap, rng));
    out.back().best_restart = r;
  }
  return out;
}

CoarsePartition partition_coarse(const CoarseGraph& cg, int k, double epsilon, int restarts,
                                 std::uint64_t seed) {
  auto candidates = restart_candidates(cg, k, epsilon, restarts, seed);
  std::size_t best = 0;
  for (std::size_t r = 1; r < candidates.size(); ++r)
    if (candidates[r].cut < candidates[best].cut) best = r;
  return std::move(candidates[best]);
}

std::vector<NodeId> Partitioning::part_sizes() const {
  std::vector<NodeId> sizes(static_cast<std::size_t>(k), 0);
  for (int p : assignment) ++sizes[p];
  return sizes;
}

std::vector<NodeId> Partitioning::members(int part) const {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < assignment.size(); ++v)
    if (assignment[v] == part) out.push_back(static_cast<NodeId>(v));
  return out;
}

std::int64_t edge_cut(const Graph& g, std::span<const int> assignment) {
  if (static_cast<NodeId>(assignment.size()) != g.num_nodes())
    throw std::invalid_argument("assignment does not cover all nodes");
  std::int64_t cut = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u))
      if (u < v && assignment[u] != assignment[v]) ++cut;
  return cut;
}

bool is_balanced(const Partitioning& p) {
  const Weight cap = balance_cap(static_cast<Weight>(p.assignment.size()), p.k, p.epsilon);
  for (NodeId s : p.part_sizes())
    if (s == 0 || s > cap) return false;
  return true;
}

namespace {

// Moves nodes out of over-full (or into empty) parts until every part size
// lies in [1, cap]. Prefers boundary moves with the best cut gain.
int rebalance(const Graph& g, std::vector<int>& assignment, int k, Weight cap) {
  std::vector<Weight> size(static_cast<std::size_t>(k), 0);
  for (int p : assignment) ++size[p];
  int moves = 0;
  auto links = [&](NodeId v, int q) {
    Weight c = 0;
    for (NodeId w : g.neighbors(v)) c += assignment[w] == q;
    return c;
  };
  for (;;) {
    int from = -1;
    int forced_to = -1;
    for (int p = 0; p < k; ++p)
      if (size[p] > cap && (from < 0 || size[p] > size[from])) from = p;
    if (from < 0) {
      const auto empty = std::find(size.begin(), size.end(), Weight{0});
      if (empty == size.end()) break;
      forced_to = static_cast<int>(empty - size.begin());
      from = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    }

    NodeId best_v = -1;
    int best_q = -1;
    Weight best_gain = std::numeric_limits<Weight>::min();
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (assignment[v] != from) continue;
      const Weight internal = links(v, from);
      if (forced_to >= 0) {
        const Weight gain = links(v, forced_to) - internal;
        if (gain > best_gain) best_v = v, best_q = forced_to, best_gain = gain;
        continue;
      }
      for (NodeId w : g.neighbors(v)) {
        const int q = assignment[w];
        if (q == from || size[q] >= cap) continue;
        const Weight gain = links(v, q) - internal;
        if (gain > best_gain || (gain == best_gain && v == best_v && q < best_q))
          best_v = v, best_q = q, best_gain = gain;
      }
    }
    if (best_v < 0) {
      // No boundary move available: shift the least attached node to the
      // smallest part.
      best_q = static_cast<int>(std::min_element(size.begin(), size.end()) - size.begin());
      Weight least = std::numeric_limits<Weight>::max();
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (assignment[v] != from) continue;
        const Weight internal = links(v, from);
        if (internal < least) least = internal, best_v = v;
      }
    }
    assignment[best_v] = best_q;
    --size[from];
    ++size[best_q];
    ++moves;
  }
  return moves;
}

}  // namespace

Partitioning uncoarsen(const Graph& g, std::span<const CoarseGraph> levels,
                       std::span<const int> coarse_assignment, int k, double epsilon,
                       int restarts_used) {
  std::vector<int> assignment(coarse_assignment.begin(), coarse_assignment.end());
  for (auto level = levels.rbegin(); level != levels.rend(); ++level) {
    const auto& map = level->fine_to_coarse();
    std::vector<int> finer(map.size(), -1);
    for (std::size_t v = 0; v < map.size(); ++v) {
      if (map[v] < 0 || static_cast<std::size_t>(map[v]) >= assignment.size())
        throw std::logic_error("projection gap at fine node " + std::to_string(v));
      finer[v] = assignment[map[v]];
    }
    assignment = std::move(finer);
  }
  if (static_cast<NodeId>(assignment.size()) != g.num_nodes())
    throw std::logic_error("projected assignment does not match the graph");
  for (int p : assignment)
    if (p < 0 || p >= k) throw std::logic_error("projected part id out of range");

  Partitioning out;
  out.k = k;
  out.epsilon = epsilon;
  out.restarts_used = restarts_used;
  const Weight cap = balance_cap(g.num_nodes(), k, epsilon);
  if (static_cast<Weight>(k) * cap < g.num_nodes())
    throw InfeasibleBalance("balance constraint infeasible for k=" + std::to_string(k));
  if (const int moved = rebalance(g, assignment, k, cap); moved > 0)
    out.warnings.push_back("rebalance moved " + std::to_string(moved) + " nodes");
  out.assignment = std::move(assignment);
  out.edge_cut = edge_cut(g, out.assignment);
  if (!is_balanced(out)) throw std::logic_error("partition violates the balance constraint");
  return out;
}

Partitioning partition_graph(const Graph& g, const PartitionOptions& options) {
  if (options.k < 1) throw std::invalid_argument("k must be >= 1");
  if (options.k > g.num_nodes()) throw std::invalid_argument("k exceeds node count");
  const Weight cap = balance_cap(g.num_nodes(), options.k, options.epsilon);
  if (static_cast<Weight>(options.k) * cap < g.num_nodes())
    throw InfeasibleBalance("balance constraint infeasible: k * cap = " +
                            std::to_string(static_cast<Weight>(options.k) * cap) + " < " +
                            std::to_string(g.num_nodes()));

  const CoarseGraph base = CoarseGraph::from_graph(g);
  CoarsenOptions co;
  co.target_fraction = options.target_fraction;
  co.min_nodes = options.k;
  co.max_node_weight = std::max<Weight>(1, cap / 4);
  co.seed = options.seed;
  const auto levels = coarsen(base, co);
  const CoarseGraph& coarsest = levels.empty() ? base : levels.back();

  // Restarts are compared on the cut of the projected, balanced result so
  // the chosen partition is the best one actually returned.
  auto candidates = restart_candidates(coarsest, options.k, options.epsilon, options.restarts,
                                       options.seed);
  std::optional<Partitioning> best;
  for (const auto& cp : candidates) {
    Partitioning p = uncoarsen(g, levels, cp.assignment, options.k, options.epsilon,
                               options.restarts);
    p.warnings.insert(p.warnings.begin(), cp.warnings.begin(), cp.warnings.end());
    if (!best || p.edge_cut < best->edge_cut) best = std::move(p);
  }
  return std::move(*best);
}

}  // namespace gad
