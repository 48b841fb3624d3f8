#pragma once

#include "gad/graph.hpp"
#include "gad/partition.hpp"
#include "gad/random.hpp"

#include <vector>

namespace fixtures {

using gad::Edge;
using gad::Graph;
using gad::NodeId;

inline Graph make_graph(NodeId n, std::vector<Edge> edges) { return Graph(n, edges); }

inline Graph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
inline Graph path(NodeId n) {
  std::vector<Edge> e;
  for (NodeId v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return make_graph(n, e);
}
inline Graph complete(NodeId n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.push_back({u, v});
  return make_graph(n, e);
}
inline Graph star(NodeId leaves) {
  std::vector<Edge> e;
  for (NodeId v = 1; v <= leaves; ++v) e.push_back({0, v});
  return make_graph(leaves + 1, e);
}
// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline Graph two_triangles() {
  return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
}

inline Graph erdos_renyi(NodeId n, double p, std::uint64_t seed) {
  gad::Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> e;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (u(rng) < p) e.push_back({a, b});
  return make_graph(n, e);
}

inline gad::Partitioning partition_of(std::vector<int> assignment, int k, double eps = 0.5) {
  gad::Partitioning p;
  p.assignment = std::move(assignment);
  p.k = k;
  p.epsilon = eps;
  return p;
}

// Random balanced assignment: a shuffled round-robin labelling.
inline std::vector<int> random_balanced(NodeId n, int k, std::uint64_t seed) {
  std::vector<int> a(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) a[v] = v % k;
  gad::Rng rng(seed);
  std::shuffle(a.begin(), a.end(), rng);
  return a;
}

}  // namespace fixtures
