#include "gad/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gad {

Graph::Graph(NodeId num_nodes, std::span<const Edge> edges, NodeData data)
    : num_nodes_(num_nodes), data_(std::move(data)) {
  if (num_nodes < 0) throw std::invalid_argument("negative node count");

  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes)
      throw std::out_of_range("edge endpoint out of range: " + std::to_string(e.u) +
                              " " + std::to_string(e.v));
    if (e.u == e.v) continue;
    directed.push_back({e.u, e.v});
    directed.push_back({e.v, e.u});
  }
  std::sort(directed.begin(), directed.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  targets_.reserve(directed.size());
  for (const Edge& e : directed) {
    ++offsets_[e.u + 1];
    targets_.push_back(e.v);
  }
  for (NodeId v = 0; v < num_nodes; ++v) offsets_[v + 1] += offsets_[v];

  validate_node_data();
}

void Graph::validate_node_data() {
  const auto n = static_cast<std::size_t>(num_nodes_);
  if (data_.features.size() == 0 && data_.features.rows() != num_nodes_)
    data_.features.resize(num_nodes_, 0);
  if (static_cast<std::size_t>(data_.features.rows()) != n)
    throw std::invalid_argument("feature rows do not match node count");
  if (data_.labels.empty()) data_.labels.assign(n, kUnlabeled);
  if (data_.labels.size() != n) throw std::invalid_argument("label count mismatch");
  for (int y : data_.labels) {
    if (y == kUnlabeled) continue;
    if (y < 0) throw std::invalid_argument("negative label");
    data_.num_classes = std::max(data_.num_classes, y + 1);
  }
  for (Mask* m : {&data_.train, &data_.val, &data_.test}) {
    if (m->empty()) m->assign(n, false);
    if (m->size() != n) throw std::invalid_argument("mask size mismatch");
  }
  for (std::size_t v = 0; v < n; ++v) {
    const int hits = data_.train[v] + data_.val[v] + data_.test[v];
    if (hits > 1) throw std::invalid_argument("split masks overlap at node " + std::to_string(v));
  }
  if (data_.names.empty()) {
    data_.names.reserve(n);
    for (std::size_t v = 0; v < n; ++v) data_.names.push_back(std::to_string(v));
  }
  if (data_.names.size() != n) throw std::invalid_argument("node name count mismatch");
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (NodeId u = 0; u < num_nodes_; ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.push_back({u, v});
  return out;
}

Graph Graph::with_split(Mask train, Mask val, Mask test) const {
  Graph copy = *this;
  copy.data_.train = std::move(train);
  copy.data_.val = std::move(val);
  copy.data_.test = std::move(test);
  copy.validate_node_data();
  return copy;
}

Graph Graph::with_features(Eigen::MatrixXd features) const {
  Graph copy = *this;
  copy.data_.features = std::move(features);
  copy.validate_node_data();
  return copy;
}

NodeId SubgraphView::num_owned() const {
  return static_cast<NodeId>(std::count(owned_.begin(), owned_.end(), true));
}

NodeId SubgraphView::local_id(NodeId global) const {
  const auto it = global_to_local_.find(global);
  return it == global_to_local_.end() ? -1 : it->second;
}

SubgraphView induce_subgraph(const Graph& g, std::span<const NodeId> node_ids,
                             std::span<const NodeId> owned_ids) {
  SubgraphView sub;
  sub.local_ids_.assign(node_ids.begin(), node_ids.end());
  sub.global_to_local_.reserve(node_ids.size());
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    const NodeId v = node_ids[i];
    if (v < 0 || v >= g.num_nodes())
      throw std::out_of_range("node id out of range: " + std::to_string(v));
    if (!sub.global_to_local_.emplace(v, static_cast<NodeId>(i)).second)
      throw std::invalid_argument("duplicate node id: " + std::to_string(v));
  }

  sub.owned_.assign(node_ids.size(), false);
  for (NodeId v : owned_ids) {
    if (v < 0 || v >= g.num_nodes())
      throw std::out_of_range("owned id out of range: " + std::to_string(v));
    const NodeId local = sub.local_id(v);
    if (local < 0)
      throw std::invalid_argument("owned id not in node set: " + std::to_string(v));
    sub.owned_[local] = true;
  }

  sub.offsets_.assign(node_ids.size() + 1, 0);
  std::vector<NodeId> row;
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    row.clear();
    for (NodeId w : g.neighbors(node_ids[i])) {
      const NodeId local = sub.local_id(w);
      if (local >= 0) row.push_back(local);
    }
    std::sort(row.begin(), row.end());
    sub.targets_.insert(sub.targets_.end(), row.begin(), row.end());
    sub.offsets_[i + 1] = static_cast<EdgeIndex>(sub.targets_.size());
  }
  return sub;
}

SubgraphView whole_graph_view(const Graph& g) {
  std::vector<NodeId> all(static_cast<std::size_t>(g.num_nodes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v) all[v] = v;
  return induce_subgraph(g, all, all);
}

double density(EdgeIndex num_nodes, EdgeIndex num_edges) {
  if (num_nodes < 2) return 0.0;
  const double n = static_cast<double>(num_nodes);
  return 2.0 * static_cast<double>(num_edges) / (n * (n - 1.0));
}

}  // namespace gad
