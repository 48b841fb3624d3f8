#pragma once

#include "gad/gcn.hpp"
#include "gad/graph.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gad {

/// Local degree share deg(v) / sum deg; uniform when the subgraph has no edges.
std::vector<double> degree_probability(const SubgraphView& sub);

enum class ZetaDistance {
  kL2,          // Euclidean norm of the feature difference
  kPerDimMean,  // mean absolute difference over feature dimensions
};

std::string to_string(ZetaDistance d);
ZetaDistance zeta_distance_from_string(const std::string& name);

struct ZetaOptions {
  double beta = 1.0;
  std::size_t pair_cap = 4096;
  ZetaDistance distance = ZetaDistance::kL2;
  std::uint64_t seed = 0;
};

struct SubgraphWeight {
  double zeta = 1.0;
  double pair_probability_sum = 0.0;  // sum of p_i p_j over the pairs used, rescaled
  double mean_distance = 0.0;         // over the pairs used
  double beta = 1.0;
  std::size_t pairs_used = 0;
  bool sampled = false;
};

/// Sum over unordered pairs i < j of p_i p_j / (d(i, j) + beta), with p from
/// degree_probability and d over feature rows (indexed by global id). Exact
/// up to pair_cap nodes; above that a seeded uniform sample of pair_cap^2 / 2
/// pairs is rescaled to the full pair count. Fewer than two nodes give 1.
SubgraphWeight zeta(const SubgraphView& sub, const Eigen::MatrixXd& features,
                    const ZetaOptions& options);

/// sum_i zeta_i * g_i / sum_j zeta_j, applied to weights and loss alike.
template <typename Scalar>
Gradients<Scalar> weighted_consensus(std::span<const Gradients<Scalar>> grads,
                                     std::span<const double> zetas) {
  if (grads.empty() || grads.size() != zetas.size())
    throw std::invalid_argument("consensus needs one zeta per gradient");
  Scalar total = 0;
  for (double z : zetas) {
    if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("zeta must be positive");
    total += static_cast<Scalar>(z);
  }
  Gradients<Scalar> out;
  out.weights.resize(grads[0].weights.size());
  for (std::size_t l = 0; l < out.weights.size(); ++l)
    out.weights[l] = Matrix<Scalar>::Zero(grads[0].weights[l].rows(), grads[0].weights[l].cols());
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].weights.size() != out.weights.size())
      throw std::invalid_argument("gradient layer count mismatch");
    const auto z = static_cast<Scalar>(zetas[i]);
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
      if (grads[i].weights[l].rows() != out.weights[l].rows() ||
          grads[i].weights[l].cols() != out.weights[l].cols())
        throw std::invalid_argument("gradient shape mismatch");
      out.weights[l] += z * grads[i].weights[l];
    }
    out.loss += z * grads[i].loss;
  }
  for (auto& w : out.weights) w /= total;
  out.loss /= total;
  return out;
}

/// Arithmetic mean; identical bits to weighted_consensus with every zeta 1.
template <typename Scalar>
Gradients<Scalar> plain_consensus(std::span<const Gradients<Scalar>> grads) {
  const std::vector<double> ones(grads.size(), 1.0);
  return weighted_consensus(grads, std::span<const double>(ones));
}

}  // namespace gad
