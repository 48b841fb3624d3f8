#include "gad/synthetic.hpp"

#include "gad/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gad {

Graph stochastic_block_model(const SbmSpec& spec) {
  if (spec.num_blocks < 1 || spec.num_nodes < spec.num_blocks)
    throw std::invalid_argument("sbm: need 1 <= blocks <= nodes");
  Rng rng = make_rng(spec.seed, "sbm");
  const NodeId n = spec.num_nodes;
  std::vector<int> block(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v)
    block[v] = static_cast<int>(static_cast<std::int64_t>(v) * spec.num_blocks / n);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (unit(rng) < (block[u] == block[v] ? spec.p_in : spec.p_out)) edges.push_back({u, v});

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd centroids(spec.num_blocks, spec.feature_dim);
  for (Eigen::Index i = 0; i < centroids.size(); ++i)
    centroids.data()[i] = spec.centroid_scale * gauss(rng);
  NodeData data;
  data.features.resize(n, spec.feature_dim);
  for (NodeId v = 0; v < n; ++v)
    for (int d = 0; d < spec.feature_dim; ++d)
      data.features(v, d) = centroids(block[v], d) + spec.noise * gauss(rng);
  data.labels = block;
  data.num_classes = spec.num_blocks;
  return Graph(n, edges, std::move(data));
}

Graph citation_like_graph(const CitationLikeSpec& spec) {
  static constexpr double kClassShare[] = {0.302, 0.157, 0.154, 0.130, 0.110, 0.080, 0.067};
  constexpr int kClasses = 7;
  const NodeId n = spec.num_nodes;
  Rng rng = make_rng(spec.seed, "citation-like");
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<int> labels(static_cast<std::size_t>(n));
  {
    std::discrete_distribution<int> pick(std::begin(kClassShare), std::end(kClassShare));
    for (auto& y : labels) y = pick(rng);
  }

  // Pareto(2.5) popularity drives both endpoint choices.
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (auto& t : theta) t = std::pow(1.0 - unit(rng), -1.0 / 2.5);

  std::vector<std::vector<NodeId>> members(kClasses);
  for (NodeId v = 0; v < n; ++v) members[labels[v]].push_back(v);
  std::vector<std::discrete_distribution<std::size_t>> in_class;
  for (const auto& m : members) {
    std::vector<double> w;
    for (NodeId v : m) w.push_back(theta[v]);
    if (w.empty()) w.push_back(1.0);
    in_class.emplace_back(w.begin(), w.end());
  }
  std::discrete_distribution<NodeId> any(theta.begin(), theta.end());
  std::vector<double> class_mass(kClasses, 0.0);
  for (NodeId v = 0; v < n; ++v) class_mass[labels[v]] += theta[v];

  const auto target = static_cast<std::size_t>(std::llround(spec.mean_degree * n / 2.0));
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<Edge> edges;
  while (edges.size() < target) {
    const NodeId u = any(rng);
    int c = labels[u];
    if (unit(rng) >= spec.homophily) {
      std::vector<double> w = class_mass;
      w[c] = 0.0;
      c = std::discrete_distribution<int>(w.begin(), w.end())(rng);
    }
    if (members[c].empty()) continue;
    const NodeId v = members[c][in_class[c](rng)];
    if (u == v) continue;
    if (seen.emplace(std::min(u, v), std::max(u, v)).second) edges.push_back({u, v});
  }

  const int vocab = spec.vocabulary;
  std::vector<std::vector<int>> topics(kClasses);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  for (auto& t : topics)
    for (int i = 0; i < spec.topic_words; ++i) t.push_back(word(rng));
  std::vector<double> zipf(static_cast<std::size_t>(vocab));
  for (int w = 0; w < vocab; ++w) zipf[w] = 1.0 / (w + 10.0);
  std::discrete_distribution<int> background(zipf.begin(), zipf.end());
  std::uniform_int_distribution<int> topic_pick(0, spec.topic_words - 1);

  NodeData data;
  data.features = Eigen::MatrixXd::Zero(n, vocab);
  for (NodeId v = 0; v < n; ++v)
    for (int k = 0; k < spec.words_per_node; ++k) {
      const int w = unit(rng) < spec.topic_word_share ? topics[labels[v]][topic_pick(rng)]
                                                      : background(rng);
      data.features(v, w) = 1.0;
    }
  data.labels = std::move(labels);
  data.num_classes = kClasses;
  return Graph(n, edges, std::move(data));
}

}  // namespace gad
