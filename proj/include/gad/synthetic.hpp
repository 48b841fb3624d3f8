#pragma once

#include "gad/graph.hpp"

#include <cstdint>

namespace gad {

/// Planted-partition graph: equal-sized blocks, edge probability p_in inside
/// a block and p_out across. Labels are block ids; features are the block's
/// random centroid plus isotropic Gaussian noise.
struct SbmSpec {
  NodeId num_nodes = 400;
  int num_blocks = 2;
  double p_in = 0.05;
  double p_out = 0.005;
  int feature_dim = 16;
  double centroid_scale = 1.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

Graph stochastic_block_model(const SbmSpec& spec);

/// Citation-network stand-in with the shape of Cora: 2708 nodes, 7 classes
/// with Cora's class proportions, sparse binary bag-of-words rows over 1433
/// words, roughly 5.3k undirected edges with ~80% label homophily and a
/// heavy-tailed degree distribution. Labels are set, masks are empty.
struct CitationLikeSpec {
  NodeId num_nodes = 2708;
  int vocabulary = 1433;
  double mean_degree = 3.9;
  double homophily = 0.81;
  int words_per_node = 18;
  double topic_word_share = 0.3;
  int topic_words = 120;
  std::uint64_t seed = 0;
};

Graph citation_like_graph(const CitationLikeSpec& spec);

}  // namespace gad
