#include "gad/augment.hpp"

#include "gad/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace gad {

std::vector<NodeId> boundary_nodes(const Graph& g, const Partitioning& p, int part) {
  if (part < 0 || part >= p.k) throw std::out_of_range("part id out of range");
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (p.assignment[v] != part) continue;
    for (NodeId w : g.neighbors(v))
      if (p.assignment[w] != part) {
        out.push_back(v);
        break;
      }
  }
  return out;
}

std::vector<NodeId> candidate_replication_nodes(const Graph& g, const Partitioning& p, int part,
                                                int layers) {
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  std::vector<int> depth(static_cast<std::size_t>(g.num_nodes()), -1);
  std::deque<NodeId> queue;
  for (NodeId b : boundary_nodes(g, p, part)) {
    depth[b] = 0;
    queue.push_back(b);
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (depth[v] == layers) continue;
    for (NodeId w : g.neighbors(v))
      if (depth[w] < 0) {
        depth[w] = depth[v] + 1;
        queue.push_back(w);
      }
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (depth[v] >= 0 && p.assignment[v] != part) out.push_back(v);
  return out;
}

std::size_t estimate_walk_count(std::span<const double> provisional, std::size_t provisional_count,
                                double z_c, double err_target) {
  if (provisional.empty()) return 0;
  const double n = static_cast<double>(provisional.size());
  const double mean = std::accumulate(provisional.begin(), provisional.end(), 0.0) / n;
  if (mean <= 0.0) return 0;
  double sq = 0.0;
  for (double x : provisional) sq += (x - mean) * (x - mean);
  const double sigma = std::sqrt(sq / n);
  if (sigma == 0.0) return provisional_count;
  const double root = z_c * sigma / (mean * err_target);
  // Guard against 384.16000000000003-style noise pushing an exact square up.
  return static_cast<std::size_t>(std::ceil(root * root - 1e-9));
}

std::string to_string(ImportanceMode mode) {
  return mode == ImportanceMode::kIndicator ? "indicator" : "multiplicity";
}

ImportanceMode importance_mode_from_string(const std::string& name) {
  if (name == "indicator") return ImportanceMode::kIndicator;
  if (name == "multiplicity") return ImportanceMode::kMultiplicity;
  throw std::invalid_argument("unknown importance mode: " + name);
}

bool ImportanceTable::contains(NodeId v) const {
  return std::binary_search(nodes.begin(), nodes.end(), v);
}

double ImportanceTable::at(NodeId v) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return 0.0;
  return values[static_cast<std::size_t>(it - nodes.begin())];
}

namespace {

struct WalkCounter {
  std::vector<int> slot;  // graph node -> candidate position, or -1
  std::vector<std::size_t> walks_with;
  std::vector<std::size_t> visits;
  std::vector<std::size_t> last_walk;

  void record(const std::vector<NodeId>& walk, std::size_t walk_index) {
    for (NodeId v : walk) {
      const int s = slot[v];
      if (s < 0) continue;
      ++visits[s];
      if (last_walk[s] != walk_index + 1) {
        last_walk[s] = walk_index + 1;
        ++walks_with[s];
      }
    }
  }
};

std::vector<NodeId> random_walk(const Graph& g, NodeId start, int steps, Rng& rng,
                                bool& truncated) {
  std::vector<NodeId> walk{start};
  walk.reserve(static_cast<std::size_t>(steps) + 1);
  truncated = false;
  NodeId cur = start;
  for (int s = 0; s < steps; ++s) {
    const auto nbrs = g.neighbors(cur);
    if (nbrs.empty()) {
      truncated = true;
      break;
    }
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    cur = nbrs[pick(rng)];
    walk.push_back(cur);
  }
  return walk;
}

}  // namespace

ImportanceResult node_importance(const Graph& g, std::span<const NodeId> boundary,
                                 std::span<const NodeId> candidates,
                                 const ImportanceOptions& options) {
  if (options.layers < 1) throw std::invalid_argument("layers must be >= 1");
  ImportanceResult out;
  auto& table = out.table;
  table.nodes.assign(candidates.begin(), candidates.end());
  std::sort(table.nodes.begin(), table.nodes.end());
  table.values.assign(table.nodes.size(), 0.0);
  table.z_c = options.z_c;
  table.err_target = options.err_target;
  table.mode = options.mode;
  out.walks.seed = options.seed;
  if (boundary.empty() || candidates.empty()) return out;

  WalkCounter counter;
  counter.slot.assign(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t i = 0; i < table.nodes.size(); ++i) counter.slot[table.nodes[i]] = static_cast<int>(i);
  counter.walks_with.assign(table.nodes.size(), 0);
  counter.visits.assign(table.nodes.size(), 0);
  counter.last_walk.assign(table.nodes.size(), 0);

  Rng rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_start(0, boundary.size() - 1);
  auto draw = [&](std::size_t count) {
    for (std::size_t j = 0; j < count; ++j) {
      bool truncated = false;
      auto walk = random_walk(g, boundary[pick_start(rng)], options.layers, rng, truncated);
      out.walks.truncated += truncated;
      counter.record(walk, out.walks.walks.size());
      out.walks.walks.push_back(std::move(walk));
    }
  };

  double degree_sum = 0.0;
  for (NodeId b : boundary) degree_sum += g.degree(b);
  const auto avg_degree = static_cast<std::size_t>(
      std::floor(degree_sum / static_cast<double>(boundary.size())));
  const std::size_t phase_one = std::max<std::size_t>(1, avg_degree) * boundary.size();
  draw(phase_one);
  out.walks.phase_one = phase_one;

  const auto& counts = options.mode == ImportanceMode::kIndicator ? counter.walks_with : counter.visits;
  std::vector<double> provisional;
  for (std::size_t c : counts)
    if (c > 0) provisional.push_back(static_cast<double>(c) / static_cast<double>(phase_one));
  if (!provisional.empty()) {
    const double n = static_cast<double>(provisional.size());
    table.mean = std::accumulate(provisional.begin(), provisional.end(), 0.0) / n;
    double sq = 0.0;
    for (double x : provisional) sq += (x - table.mean) * (x - table.mean);
    table.sigma = std::sqrt(sq / n);
  }
  const std::size_t wanted =
      estimate_walk_count(provisional, phase_one, options.z_c, options.err_target);
  const std::size_t total = std::max(phase_one, std::min(wanted, options.max_walks));
  draw(total - phase_one);
  table.walk_count = out.walks.walks.size();

  if (options.mode == ImportanceMode::kIndicator) {
    for (std::size_t i = 0; i < table.nodes.size(); ++i)
      table.values[i] = static_cast<double>(counter.walks_with[i]) /
                        static_cast<double>(table.walk_count);
  } else {
    const double all = static_cast<double>(
        std::accumulate(counter.visits.begin(), counter.visits.end(), std::size_t{0}));
    if (all > 0.0)
      for (std::size_t i = 0; i < table.nodes.size(); ++i)
        table.values[i] = static_cast<double>(counter.visits[i]) / all;
  }
  return out;
}

std::size_t replication_budget(const SubgraphView& sub, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  const double raw = alpha * (1.0 + density(sub)) * static_cast<double>(sub.num_nodes());
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

Selection depth_first_select(const ImportanceTable& table, const WalkSet& walks,
                             std::size_t budget) {
  Selection out;
  if (budget == 0) return out;

  std::vector<double> score(walks.walks.size(), 0.0);
  std::vector<NodeId> distinct;
  for (std::size_t w = 0; w < walks.walks.size(); ++w) {
    distinct.clear();
    for (NodeId v : walks.walks[w])
      if (table.contains(v)) distinct.push_back(v);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (NodeId v : distinct) score[w] += table.at(v);
  }
  std::vector<std::size_t> order(walks.walks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  std::vector<NodeId> chosen;
  for (std::size_t w : order) {
    for (NodeId v : walks.walks[w]) {
      if (!table.contains(v)) continue;
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      chosen.push_back(v);
      out.replicas.push_back(v);
      if (out.replicas.size() == budget) return out;
    }
  }
  out.shortfall = budget - out.replicas.size();
  return out;
}

AugmentedSubgraph augment_subgraph(const Graph& g, const Partitioning& p, int part,
                                   std::span<const NodeId> replicas) {
  AugmentedSubgraph out;
  out.part = part;
  std::vector<NodeId> owned = p.members(part);
  std::vector<NodeId> nodes = owned;
  for (NodeId r : replicas) {
    if (r < 0 || r >= g.num_nodes()) throw std::out_of_range("replica id out of range");
    if (p.assignment[r] == part) throw std::invalid_argument("replica is owned by the part");
    nodes.push_back(r);
    out.replica_source.push_back(p.assignment[r]);
  }
  out.view = induce_subgraph(g, nodes, owned);
  return out;
}

std::vector<AugmentedSubgraph> augment_partitions(const Graph& g, const Partitioning& p,
                                                  const AugmentOptions& options) {
  std::vector<AugmentedSubgraph> out;
  out.reserve(static_cast<std::size_t>(p.k));
  for (int part = 0; part < p.k; ++part) {
    if (!options.enabled) {
      out.push_back(augment_subgraph(g, p, part, {}));
      continue;
    }
    const auto boundary = boundary_nodes(g, p, part);
    const auto candidates = candidate_replication_nodes(g, p, part, options.layers);
    ImportanceOptions io = options.importance;
    io.layers = options.layers;
    io.seed = derive_seed(options.seed, "augment", static_cast<std::uint64_t>(part));
    ImportanceResult imp = node_importance(g, boundary, candidates, io);

    const auto owned = p.members(part);
    const SubgraphView base = induce_subgraph(g, owned, owned);
    const std::size_t budget = std::min(replication_budget(base, options.alpha), candidates.size());
    Selection sel = depth_first_select(imp.table, imp.walks, budget);

    AugmentedSubgraph aug = augment_subgraph(g, p, part, sel.replicas);
    aug.budget = budget;
    aug.shortfall = sel.shortfall;
    aug.candidate_count = candidates.size();
    aug.phase_one_walks = imp.walks.phase_one;
    aug.importance = std::move(imp.table);
    out.push_back(std::move(aug));
  }
  return out;
}

std::vector<int> assign_to_workers(std::span<const NodeId> subgraph_sizes, int num_workers) {
  if (num_workers < 1) throw std::invalid_argument("num_workers must be >= 1");
  std::vector<std::size_t> order(subgraph_sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return subgraph_sizes[a] > subgraph_sizes[b];
  });
  std::vector<std::int64_t> load(static_cast<std::size_t>(num_workers), 0);
  std::vector<int> worker(subgraph_sizes.size(), 0);
  for (std::size_t s : order) {
    const int w = static_cast<int>(std::min_element(load.begin(), load.end()) - load.begin());
    worker[s] = w;
    load[w] += subgraph_sizes[s];
  }
  return worker;
}

std::vector<int> assign_to_workers(std::span<const AugmentedSubgraph> subgraphs, int num_workers) {
  std::vector<NodeId> sizes;
  sizes.reserve(subgraphs.size());
  for (const auto& s : subgraphs) sizes.push_back(s.view.num_nodes());
  return assign_to_workers(sizes, num_workers);
}

}  // namespace gad
