#pragma once

#include "gad/graph.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gad {

using Weight = std::int64_t;

/// One level of the multilevel hierarchy: weighted nodes and edges plus the
/// map from the previous (finer) level's ids onto this level.
class CoarseGraph {
 public:
  struct WeightedEdge {
    NodeId u;
    NodeId v;
    Weight w;
  };

  CoarseGraph() = default;
  /// Parallel edges are merged by summing their weights; self-loops dropped.
  CoarseGraph(std::vector<Weight> node_weights, std::span<const WeightedEdge> edges,
              std::vector<NodeId> fine_to_coarse = {});
  /// Unit node and edge weights over `g`.
  static CoarseGraph from_graph(const Graph& g);

  NodeId num_nodes() const { return static_cast<NodeId>(node_weight_.size()); }
  Weight node_weight(NodeId v) const { return node_weight_[v]; }
  Weight total_node_weight() const;
  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  std::span<const Weight> edge_weights(NodeId v) const {
    return {weights_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  /// Weight of edge (u, v), 0 when absent.
  Weight edge_weight(NodeId u, NodeId v) const;
  EdgeIndex num_edges() const { return static_cast<EdgeIndex>(targets_.size()) / 2; }
  const std::vector<NodeId>& fine_to_coarse() const { return fine_to_coarse_; }

 private:
  std::vector<Weight> node_weight_;
  std::vector<EdgeIndex> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<Weight> weights_;
  std::vector<NodeId> fine_to_coarse_;
};

class InfeasibleBalance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// floor((1 + epsilon) * ceil(total / k)): the per-part size limit.
Weight balance_cap(Weight total, int k, double epsilon);

/// Mate of each node under heavy-edge matching with a fixed visiting order
/// (a node matched with itself stays single). Merges whose combined weight
/// would exceed `max_node_weight` are skipped.
std::vector<NodeId> heavy_edge_matching(const CoarseGraph& level, std::span<const NodeId> order,
                                        Weight max_node_weight);

/// Contracts `level` along a matching (mate[v] == v for unmatched nodes).
CoarseGraph contract(const CoarseGraph& level, std::span<const NodeId> mate);

struct CoarsenOptions {
  double target_fraction = 0.2;
  double min_shrink = 0.05;
  NodeId min_nodes = 1;
  Weight max_node_weight = std::numeric_limits<Weight>::max();
  std::uint64_t seed = 0;
};

/// Heavy-edge coarsening, coarsest level last. Stops at
/// target_fraction * |V| nodes, or when a level would shrink by less than
/// `min_shrink` or fall below `min_nodes` (that level is discarded).
std::vector<CoarseGraph> coarsen(const CoarseGraph& base, const CoarsenOptions& options);

struct CoarsePartition {
  std::vector<int> assignment;
  Weight cut = 0;
  int best_restart = 0;
  std::vector<std::string> warnings;
};

/// Cut weight of an assignment over a weighted level.
Weight weighted_cut(const CoarseGraph& cg, std::span<const int> assignment);

/// One seeded greedy region growing per restart, restart r drawing from
/// stream ("restart", r).
std::vector<CoarsePartition> restart_candidates(const CoarseGraph& cg, int k, double epsilon,
                                                int restarts, std::uint64_t seed);

/// Seeded greedy region growing, best of `restarts` by weighted cut (ties:
/// lowest restart). The cap is derived from
/// the level's total node weight, which equals |V| of the original graph.
CoarsePartition partition_coarse(const CoarseGraph& cg, int k, double epsilon, int restarts,
                                 std::uint64_t seed);

struct Partitioning {
  std::vector<int> assignment;
  int k = 1;
  double epsilon = 0.0;
  std::int64_t edge_cut = 0;
  int restarts_used = 0;
  std::vector<std::string> warnings;

  std::vector<NodeId> part_sizes() const;
  std::vector<NodeId> members(int part) const;
};

/// Projects a coarsest-level assignment back to `g`, repairs balance on node
/// counts when needed and recomputes the cut on the original edges.
Partitioning uncoarsen(const Graph& g, std::span<const CoarseGraph> levels,
                       std::span<const int> coarse_assignment, int k, double epsilon,
                       int restarts_used = 0);

std::int64_t edge_cut(const Graph& g, std::span<const int> assignment);
inline std::int64_t edge_cut(const Graph& g, const Partitioning& p) {
  return edge_cut(g, p.assignment);
}

/// True when every part is non-empty and within balance_cap.
bool is_balanced(const Partitioning& p);

struct PartitionOptions {
  int k = 4;
  double epsilon = 0.05;
  int restarts = 8;
  double target_fraction = 0.2;
  std::uint64_t seed = 0;
};

/// Coarsen, grow `restarts` candidate partitions on the coarsest level,
/// uncoarsen each and keep the smallest original-graph cut (ties: lowest
/// restart).
Partitioning partition_graph(const Graph& g, const PartitionOptions& options);

}  // namespace gad
