#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gad {

using NodeId = std::int32_t;
using EdgeIndex = std::int64_t;
using Mask = std::vector<bool>;

inline constexpr int kUnlabeled = -1;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Per-node payload attached to a graph. Empty members are filled with
/// defaults by the Graph constructor (zero-width features, unlabeled, no
/// masks, decimal names).
struct NodeData {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int num_classes = 0;
  Mask train;
  Mask val;
  Mask test;
  std::vector<std::string> names;
};

/// Immutable undirected graph in CSR form. Each edge is stored in both
/// directions; self-loops and duplicates are removed on construction.
class Graph {
 public:
  Graph() = default;
  Graph(NodeId num_nodes, std::span<const Edge> edges, NodeData data = {});

  NodeId num_nodes() const { return num_nodes_; }
  EdgeIndex num_edges() const { return static_cast<EdgeIndex>(targets_.size()) / 2; }

  std::span<const EdgeIndex> offsets() const { return offsets_; }
  std::span<const NodeId> targets() const { return targets_; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  NodeId degree(NodeId v) const {
    return static_cast<NodeId>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(NodeId u, NodeId v) const;

  const Eigen::MatrixXd& features() const { return data_.features; }
  Eigen::Index feature_dim() const { return data_.features.cols(); }
  const std::vector<int>& labels() const { return data_.labels; }
  int num_classes() const { return data_.num_classes; }
  const Mask& train_mask() const { return data_.train; }
  const Mask& val_mask() const { return data_.val; }
  const Mask& test_mask() const { return data_.test; }
  const std::vector<std::string>& node_names() const { return data_.names; }

  /// Undirected edges with u < v, sorted lexicographically.
  std::vector<Edge> edge_list() const;

  /// Copy with replaced split masks (validated for size and disjointness).
  Graph with_split(Mask train, Mask val, Mask test) const;
  /// Copy with replaced feature matrix.
  Graph with_features(Eigen::MatrixXd features) const;

 private:
  void validate_node_data();

  NodeId num_nodes_ = 0;
  std::vector<EdgeIndex> offsets_{0};
  std::vector<NodeId> targets_;
  NodeData data_;
};

/// Local view over a node subset of a Graph: local CSR, id maps and
/// ownership flags (false = replica of a node owned by another partition).
class SubgraphView {
 public:
  SubgraphView() = default;

  NodeId num_nodes() const { return static_cast<NodeId>(local_ids_.size()); }
  EdgeIndex num_edges() const { return static_cast<EdgeIndex>(targets_.size()) / 2; }
  NodeId num_owned() const;

  std::span<const NodeId> local_ids() const { return local_ids_; }
  NodeId global_id(NodeId local) const { return local_ids_[local]; }
  /// Local index of a global id, or -1 when absent.
  NodeId local_id(NodeId global) const;
  bool contains(NodeId global) const { return local_id(global) >= 0; }

  std::span<const EdgeIndex> offsets() const { return offsets_; }
  std::span<const NodeId> targets() const { return targets_; }
  std::span<const NodeId> neighbors(NodeId local) const {
    return {targets_.data() + offsets_[local],
            static_cast<std::size_t>(offsets_[local + 1] - offsets_[local])};
  }
  NodeId degree(NodeId local) const {
    return static_cast<NodeId>(offsets_[local + 1] - offsets_[local]);
  }
  bool owned(NodeId local) const { return owned_[local]; }
  const Mask& owned_mask() const { return owned_; }

 private:
  friend SubgraphView induce_subgraph(const Graph&, std::span<const NodeId>,
                                      std::span<const NodeId>);

  std::vector<NodeId> local_ids_;
  std::unordered_map<NodeId, NodeId> global_to_local_;
  std::vector<EdgeIndex> offsets_{0};
  std::vector<NodeId> targets_;
  Mask owned_;
};

/// Subgraph on `node_ids` (local order = given order) holding every edge of
/// `g` with both endpoints in the set. Throws std::out_of_range for bad ids
/// and std::invalid_argument for duplicates or owned ids outside the set.
SubgraphView induce_subgraph(const Graph& g, std::span<const NodeId> node_ids,
                             std::span<const NodeId> owned_ids);

/// View over all of `g`, every node owned.
SubgraphView whole_graph_view(const Graph& g);

/// 2|e| / (|v|(|v|-1)); 0 for fewer than two nodes.
double density(EdgeIndex num_nodes, EdgeIndex num_edges);
inline double density(const SubgraphView& sub) {
  return density(sub.num_nodes(), sub.num_edges());
}

template <typename Scalar = double>
using NormalizedAdjacency = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// D^-1/2 (A + I) D^-1/2 with D = deg + 1 over a CSR (offsets, targets).
/// Entry (i, j) is computed from the product (d_i + 1)(d_j + 1), which is
/// commutative, so the result is exactly symmetric.
template <typename Scalar = double>
NormalizedAdjacency<Scalar> normalized_adjacency(std::span<const EdgeIndex> offsets,
                                                 std::span<const NodeId> targets) {
  const auto n = static_cast<Eigen::Index>(offsets.size()) - 1;
  NormalizedAdjacency<Scalar> adj(n, n);
  Eigen::VectorXi per_row(n);
  for (Eigen::Index i = 0; i < n; ++i)
    per_row[i] = static_cast<int>(offsets[i + 1] - offsets[i]) + 1;
  adj.reserve(per_row);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar di = static_cast<Scalar>(offsets[i + 1] - offsets[i]) + Scalar(1);
    adj.insert(i, i) = Scalar(1) / std::sqrt(di * di);
    for (EdgeIndex e = offsets[i]; e < offsets[i + 1]; ++e) {
      const NodeId j = targets[e];
      const Scalar dj = static_cast<Scalar>(offsets[j + 1] - offsets[j]) + Scalar(1);
      adj.insert(i, j) = Scalar(1) / std::sqrt(di * dj);
    }
  }
  adj.makeCompressed();
  return adj;
}

template <typename Scalar = double>
NormalizedAdjacency<Scalar> normalized_adjacency(const SubgraphView& sub) {
  return normalized_adjacency<Scalar>(sub.offsets(), sub.targets());
}

template <typename Scalar = double>
NormalizedAdjacency<Scalar> normalized_adjacency(const Graph& g) {
  return normalized_adjacency<Scalar>(g.offsets(), g.targets());
}

}  // namespace gad
