#include "gad/consensus.hpp"

#include "gad/random.hpp"

#include <cmath>

namespace gad {

std::vector<double> degree_probability(const SubgraphView& sub) {
  const NodeId n = sub.num_nodes();
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return p;
  const double total = 2.0 * static_cast<double>(sub.num_edges());
  for (NodeId v = 0; v < n; ++v)
    p[v] = total > 0.0 ? sub.degree(v) / total : 1.0 / n;
  return p;
}

std::string to_string(ZetaDistance d) {
  return d == ZetaDistance::kL2 ? "l2" : "per_dim_mean";
}

ZetaDistance zeta_distance_from_string(const std::string& name) {
  if (name == "l2") return ZetaDistance::kL2;
  if (name == "per_dim_mean") return ZetaDistance::kPerDimMean;
  throw std::invalid_argument("unknown zeta distance: " + name);
}

SubgraphWeight zeta(const SubgraphView& sub, const Eigen::MatrixXd& features,
                    const ZetaOptions& options) {
  if (!(options.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  SubgraphWeight out;
  out.beta = options.beta;
  const NodeId n = sub.num_nodes();
  if (n < 2) return out;

  const auto p = degree_probability(sub);
  const Eigen::Index dim = features.cols();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> local(n, dim);
  for (NodeId v = 0; v < n; ++v) local.row(v) = features.row(sub.global_id(v));
  auto distance = [&](NodeId i, NodeId j) {
    if (dim == 0) return 0.0;
    const auto diff = local.row(i) - local.row(j);
    return options.distance == ZetaDistance::kL2 ? diff.norm()
                                                 : diff.cwiseAbs().sum() / static_cast<double>(dim);
  };

  double sum = 0.0, prob = 0.0, dist = 0.0;
  if (static_cast<std::size_t>(n) <= options.pair_cap) {
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) {
        const double d = distance(i, j);
        const double pp = p[i] * p[j];
        sum += pp / (d + options.beta);
        prob += pp;
        dist += d;
      }
    out.pairs_used = static_cast<std::size_t>(n) * (n - 1) / 2;
    out.zeta = sum;
    out.pair_probability_sum = prob;
  } else {
    Rng rng = make_rng(options.seed, "zeta-pairs");
    std::uniform_int_distribution<NodeId> pick(0, n - 1);
    const std::size_t draws = options.pair_cap * options.pair_cap / 2;
    for (std::size_t s = 0; s < draws; ++s) {
      NodeId i = pick(rng), j = pick(rng);
      while (j == i) j = pick(rng);
      const double d = distance(i, j);
      const double pp = p[i] * p[j];
      sum += pp / (d + options.beta);
      prob += pp;
      dist += d;
    }
    const double scale = static_cast<double>(n) * (n - 1) / 2.0 / static_cast<double>(draws);
    out.pairs_used = draws;
    out.sampled = true;
    out.zeta = sum * scale;
    out.pair_probability_sum = prob * scale;
  }
  out.mean_distance = dist / static_cast<double>(out.pairs_used);
  return out;
}

}  // namespace gad
