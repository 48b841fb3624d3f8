#pragma once

#include "gad/graph.hpp"
#include "gad/random.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace gad {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
struct GcnParams {
  std::vector<Matrix<Scalar>> weights;  // W(1) .. W(L)
  std::uint64_t seed = 0;
  std::string scheme = "glorot_uniform";

  int num_layers() const { return static_cast<int>(weights.size()); }

  /// in_dim, then the output width of every layer.
  std::vector<Eigen::Index> dims() const {
    std::vector<Eigen::Index> out;
    if (weights.empty()) return out;
    out.push_back(weights.front().rows());
    for (const auto& w : weights) out.push_back(w.cols());
    return out;
  }
};

/// in_dim -> hidden (layers - 1 times) -> num_classes.
inline std::vector<Eigen::Index> layer_dims(Eigen::Index in_dim, Eigen::Index hidden,
                                            Eigen::Index num_classes, int layers) {
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  std::vector<Eigen::Index> dims{in_dim};
  for (int l = 1; l < layers; ++l) dims.push_back(hidden);
  dims.push_back(num_classes);
  return dims;
}

/// Glorot-uniform weights, U(-r, r) with r = sqrt(6 / (fan_in + fan_out)),
/// filled column-major from Rng(seed).
template <typename Scalar = double>
GcnParams<Scalar> glorot_init(std::span<const Eigen::Index> dims, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("need at least one layer");
  GcnParams<Scalar> p;
  p.seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double r = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> u(-r, r);
    Matrix<Scalar> w(dims[l], dims[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(u(rng));
    p.weights.push_back(std::move(w));
  }
  return p;
}

template <typename Features>
inline constexpr bool is_sparse_v =
    std::is_base_of_v<Eigen::SparseMatrixBase<Features>, Features>;

/// Storage for Ã·X: sparse when the features are sparse.
template <typename Scalar, typename Features>
using PropagatedInput = std::conditional_t<is_sparse_v<Features>,
                                           Eigen::SparseMatrix<Scalar, Eigen::RowMajor>,
                                           Matrix<Scalar>>;

template <typename Scalar, typename Input = Matrix<Scalar>>
struct ForwardCache {
  Input propagated_input;                  // Ã·H(0)
  std::vector<Matrix<Scalar>> propagated;  // Ã·H(l) for l = 1 .. L-1
  std::vector<Matrix<Scalar>> pre;         // Z(l) = Ã·H(l-1)·W(l), l = 1 .. L
  std::vector<Matrix<Scalar>> hidden;      // H(l) = ReLU(Z(l)), l = 1 .. L-1
  Matrix<Scalar> probs;                    // softmax(Z(L))
};

template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& z) {
  Matrix<Scalar> out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Scalar top = z.row(i).maxCoeff();
    out.row(i) = (z.row(i).array() - top).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

template <typename Scalar, typename Features>
ForwardCache<Scalar, PropagatedInput<Scalar, Features>> forward(
    const GcnParams<Scalar>& params, const NormalizedAdjacency<Scalar>& adj, const Features& x) {
  if (params.weights.empty()) throw std::invalid_argument("params have no layers");
  if (x.rows() != adj.rows())
    throw std::invalid_argument("feature rows do not match adjacency size");
  if (x.cols() != params.weights.front().rows())
    throw std::invalid_argument("feature width does not match first layer");
  ForwardCache<Scalar, PropagatedInput<Scalar, Features>> c;
  const int layers = params.num_layers();
  c.propagated_input = adj * x;
  Matrix<Scalar> z = c.propagated_input * params.weights[0];
  for (int l = 1; l < layers; ++l) {
    c.pre.push_back(std::move(z));
    c.hidden.push_back(c.pre.back().cwiseMax(Scalar(0)));
    c.propagated.push_back(adj * c.hidden.back());
    z = c.propagated.back() * params.weights[l];
  }
  c.pre.push_back(std::move(z));
  c.probs = softmax_rows(c.pre.back());
  return c;
}

template <typename Scalar = double>
struct Gradients {
  std::vector<Matrix<Scalar>> weights;  // dL/dW(l), shaped like the params
  Scalar loss = 0;
};

/// Mean categorical cross-entropy over `loss_mask` (log clipped at 1e-12)
/// and its exact gradient with respect to every weight matrix.
template <typename Scalar, typename Input>
Gradients<Scalar> loss_and_backward(const ForwardCache<Scalar, Input>& cache,
                                    const GcnParams<Scalar>& params,
                                    const NormalizedAdjacency<Scalar>& adj,
                                    std::span<const int> labels, const Mask& loss_mask) {
  const Eigen::Index n = cache.probs.rows();
  const Eigen::Index classes = cache.probs.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n ||
      static_cast<Eigen::Index>(loss_mask.size()) != n)
    throw std::invalid_argument("labels/mask size mismatch");
  const auto m = std::count(loss_mask.begin(), loss_mask.end(), true);
  if (m == 0) throw std::invalid_argument("loss mask is empty");

  Gradients<Scalar> g;
  Matrix<Scalar> dz = Matrix<Scalar>::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!loss_mask[i]) continue;
    const int y = labels[i];
    if (y < 0 || y >= classes) throw std::out_of_range("label out of range");
    g.loss -= std::log(std::max(cache.probs(i, y), Scalar(1e-12)));
    dz.row(i) = cache.probs.row(i);
    dz(i, y) -= Scalar(1);
  }
  const Scalar inv_m = Scalar(1) / static_cast<Scalar>(m);
  g.loss *= inv_m;
  dz *= inv_m;

  const int layers = params.num_layers();
  g.weights.resize(layers);
  for (int l = layers - 1; l >= 0; --l) {
    if (l == 0) {
      g.weights[0] = cache.propagated_input.transpose() * dz;
      break;
    }
    g.weights[l] = cache.propagated[l - 1].transpose() * dz;
    Matrix<Scalar> dh = adj.transpose() * (dz * params.weights[l].transpose());
    dz = dh.cwiseProduct((cache.pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
  }
  return g;
}

/// W <- W - eta * dW, returning new params.
template <typename Scalar>
GcnParams<Scalar> sgd_update(const GcnParams<Scalar>& params, const Gradients<Scalar>& grads,
                             Scalar eta) {
  if (!(eta > Scalar(0))) throw std::invalid_argument("eta must be > 0");
  if (grads.weights.size() != params.weights.size())
    throw std::invalid_argument("gradient layer count mismatch");
  GcnParams<Scalar> out = params;
  for (std::size_t l = 0; l < out.weights.size(); ++l) {
    if (grads.weights[l].rows() != out.weights[l].rows() ||
        grads.weights[l].cols() != out.weights[l].cols())
      throw std::invalid_argument("gradient shape mismatch");
    out.weights[l] -= eta * grads.weights[l];
  }
  return out;
}

/// Row-wise argmax, ties to the lowest class.
template <typename Scalar>
std::vector<int> predict(const Matrix<Scalar>& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()), 0);
  for (Eigen::Index i = 0; i < probs.rows(); ++i)
    for (Eigen::Index c = 1; c < probs.cols(); ++c)
      if (probs(i, c) > probs(i, out[i])) out[i] = static_cast<int>(c);
  return out;
}

}  // namespace gad
