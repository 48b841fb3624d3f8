#pragma once

#include "gad/graph.hpp"
#include "gad/partition.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gad {

/// Owned nodes of `part` with at least one neighbor in another part, sorted.
std::vector<NodeId> boundary_nodes(const Graph& g, const Partitioning& p, int part);

/// Nodes outside `part` within `layers` hops of its boundary (BFS over the
/// whole graph), sorted.
std::vector<NodeId> candidate_replication_nodes(const Graph& g, const Partitioning& p, int part,
                                                int layers);

/// Monte-Carlo sample size ceil((z_c * sigma / (mean * err_target))^2) from
/// provisional importance values. Returns 0 when the mean is 0 and
/// `provisional_count` when the values have zero spread.
std::size_t estimate_walk_count(std::span<const double> provisional, std::size_t provisional_count,
                                double z_c, double err_target);

enum class ImportanceMode {
  kIndicator,     // walks visiting v at least once / walk count
  kMultiplicity,  // visits of v / visits of all candidates
};

std::string to_string(ImportanceMode mode);
ImportanceMode importance_mode_from_string(const std::string& name);

struct WalkSet {
  std::vector<std::vector<NodeId>> walks;
  std::uint64_t seed = 0;
  std::size_t phase_one = 0;  // walks drawn before the sample-size estimate
  std::size_t truncated = 0;  // walks that hit a node without neighbors
};

/// I(v) over the candidate set (sorted ids, parallel values).
struct ImportanceTable {
  std::vector<NodeId> nodes;
  std::vector<double> values;
  std::size_t walk_count = 0;
  double z_c = 1.96;
  double err_target = 0.05;
  double sigma = 0.0;  // spread of the provisional estimates
  double mean = 0.0;   // mean of the provisional estimates
  ImportanceMode mode = ImportanceMode::kIndicator;

  /// I(v), or 0 for nodes outside the candidate set.
  double at(NodeId v) const;
  bool contains(NodeId v) const;
};

struct ImportanceOptions {
  int layers = 2;
  double z_c = 1.96;
  double err_target = 0.05;
  ImportanceMode mode = ImportanceMode::kIndicator;
  std::size_t max_walks = 1'000'000;
  std::uint64_t seed = 0;
};

struct ImportanceResult {
  ImportanceTable table;
  WalkSet walks;
};

/// Boundary-rooted uniform random walks of `layers` steps over `g`. A first
/// batch of floor(avg boundary degree) * |B| walks (at least |B|) sizes the
/// sample through estimate_walk_count; the remainder is then drawn and I(v)
/// computed over all walks.
ImportanceResult node_importance(const Graph& g, std::span<const NodeId> boundary,
                                 std::span<const NodeId> candidates,
                                 const ImportanceOptions& options);

/// ceil(alpha * (1 + density) * |v|).
std::size_t replication_budget(const SubgraphView& sub, double alpha);

struct Selection {
  std::vector<NodeId> replicas;
  std::size_t shortfall = 0;  // budget that no walk could fill
};

/// Walks ranked by the summed importance of their distinct candidates (ties:
/// earliest walk); candidates are taken in walk order, each once, until the
/// budget is met.
Selection depth_first_select(const ImportanceTable& table, const WalkSet& walks,
                             std::size_t budget);

struct AugmentedSubgraph {
  int part = 0;
  SubgraphView view;               // owned nodes first, then replicas
  std::vector<int> replica_source;  // owning part per replica, selection order
  std::size_t budget = 0;
  std::size_t shortfall = 0;
  std::size_t candidate_count = 0;
  ImportanceTable importance;
  std::size_t phase_one_walks = 0;

  NodeId num_replicas() const { return static_cast<NodeId>(replica_source.size()); }
};

/// Partition `part` plus `replicas`, with every original edge among them.
AugmentedSubgraph augment_subgraph(const Graph& g, const Partitioning& p, int part,
                                   std::span<const NodeId> replicas);

struct AugmentOptions {
  bool enabled = true;
  int layers = 2;
  double alpha = 0.01;
  ImportanceOptions importance;  // layers and seed are overwritten per part
  std::uint64_t seed = 0;
};

/// Runs boundary detection, importance estimation, budgeting and selection
/// for every part. Part i draws from stream ("augment", i).
std::vector<AugmentedSubgraph> augment_partitions(const Graph& g, const Partitioning& p,
                                                  const AugmentOptions& options);

/// Greedy loading: largest subgraph first onto the worker holding the fewest
/// nodes (ties: lowest worker id).
std::vector<int> assign_to_workers(std::span<const NodeId> subgraph_sizes, int num_workers);
std::vector<int> assign_to_workers(std::span<const AugmentedSubgraph> subgraphs, int num_workers);

}  // namespace gad
