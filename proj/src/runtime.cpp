#include "gad/runtime.hpp"

#include "gad/random.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

namespace gad {

SparseFeatures gather_sparse_rows(const Eigen::MatrixXd& features, std::span<const NodeId> ids) {
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t r = 0; r < ids.size(); ++r)
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      const double x = features(ids[r], c);
      if (x != 0.0) entries.emplace_back(static_cast<int>(r), static_cast<int>(c), x);
    }
  SparseFeatures out(static_cast<Eigen::Index>(ids.size()), features.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

std::int64_t CommMetrics::bytes_without() const {
  return std::accumulate(remote_without.begin(), remote_without.end(), std::int64_t{0}) *
         feature_dim * 4;
}

std::int64_t CommMetrics::bytes_with() const {
  return std::accumulate(remote_with.begin(), remote_with.end(), std::int64_t{0}) * feature_dim *
         4;
}

double CommMetrics::reduction() const {
  const auto without = bytes_without();
  if (without == 0) return 0.0;
  return 1.0 - static_cast<double>(bytes_with()) / static_cast<double>(without);
}

CommMetrics communication_size(const Graph& g, const Partitioning& p,
                               std::span<const AugmentedSubgraph> augmented, int layers,
                               std::int64_t feature_dim) {
  CommMetrics m;
  m.feature_dim = feature_dim;
  for (int part = 0; part < p.k; ++part) {
    const auto halo = candidate_replication_nodes(g, p, part, layers);
    const AugmentedSubgraph* aug = nullptr;
    for (const auto& a : augmented)
      if (a.part == part) aug = &a;
    std::int64_t local = 0;
    if (aug != nullptr)
      for (NodeId v : halo)
        if (aug->view.contains(v)) ++local;
    m.remote_without.push_back(static_cast<std::int64_t>(halo.size()));
    m.remote_with.push_back(static_cast<std::int64_t>(halo.size()) - local);
  }
  return m;
}

void attribute_to_workers(CommMetrics& metrics, std::span<const int> worker_of, int num_workers) {
  metrics.worker_remote_without.assign(static_cast<std::size_t>(num_workers), 0);
  metrics.worker_remote_with.assign(static_cast<std::size_t>(num_workers), 0);
  for (std::size_t part = 0; part < worker_of.size() && part < metrics.remote_with.size(); ++part) {
    metrics.worker_remote_without[worker_of[part]] += metrics.remote_without[part];
    metrics.worker_remote_with[worker_of[part]] += metrics.remote_with[part];
  }
}

std::string to_string(ConsensusMode mode) {
  return mode == ConsensusMode::kPerRound ? "per_round" : "per_epoch";
}

ConsensusMode consensus_mode_from_string(const std::string& name) {
  if (name == "per_round") return ConsensusMode::kPerRound;
  if (name == "per_epoch") return ConsensusMode::kPerEpoch;
  throw std::invalid_argument("unknown consensus mode: " + name);
}

double accuracy(const Matrix<double>& probs, std::span<const int> labels, const Mask& mask) {
  const auto total = std::count(mask.begin(), mask.end(), true);
  if (total == 0) throw std::invalid_argument("evaluation mask is empty");
  const auto predicted = predict(probs);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && predicted[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(total);
}

double evaluate(const GcnParams<double>& params, const Graph& g, const Mask& mask) {
  const auto adj = normalized_adjacency<double>(g);
  return accuracy(forward(params, adj, g.features()).probs, g.labels(), mask);
}

namespace {

struct PreparedSubgraph {
  NormalizedAdjacency<double> adj;
  SparseFeatures features;
  std::vector<int> labels;
  Mask loss_mask;
  bool trainable = false;
};

PreparedSubgraph prepare(const Graph& g, const SubgraphView& view) {
  PreparedSubgraph s;
  s.adj = normalized_adjacency<double>(view);
  s.features = gather_sparse_rows(g.features(), view.local_ids());
  const Mask& train = g.train_mask();
  for (NodeId v = 0; v < view.num_nodes(); ++v) {
    const NodeId gid = view.global_id(v);
    s.labels.push_back(g.labels()[gid]);
    const bool use = view.owned(v) && !train.empty() && train[gid];
    s.loss_mask.push_back(use);
    s.trainable = s.trainable || use;
  }
  return s;
}

struct FullGraph {
  NormalizedAdjacency<double> adj;
  SparseFeatures features;
};

struct Evaluation {
  double val = 0.0;
  double test = 0.0;
};

double masked_accuracy(const Matrix<double>& probs, const Graph& g, const Mask& mask) {
  if (std::count(mask.begin(), mask.end(), true) == 0) return 0.0;
  return accuracy(probs, g.labels(), mask);
}

Evaluation evaluate_full(const GcnParams<double>& params, const Graph& g, const FullGraph& full) {
  const auto cache = forward(params, full.adj, full.features);
  return {masked_accuracy(cache.probs, g, g.val_mask()),
          masked_accuracy(cache.probs, g, g.test_mask())};
}

double max_divergence(const std::vector<GcnParams<double>>& replicas) {
  double worst = 0.0;
  for (std::size_t w = 1; w < replicas.size(); ++w)
    for (std::size_t l = 0; l < replicas[0].weights.size(); ++l)
      worst = std::max(worst,
                       (replicas[w].weights[l] - replicas[0].weights[l]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TrainReport train(const Graph& g, const Partitioning& p,
                  std::span<const AugmentedSubgraph> augmented, const TrainConfig& config) {
  if (augmented.empty()) throw std::invalid_argument("no subgraphs to train on");
  if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (config.layers < 1 || config.hidden < 1 || config.epochs < 0)
    throw std::invalid_argument("invalid model shape or epoch count");
  if (!(config.eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (g.num_classes() < 1) throw std::invalid_argument("graph has no classes");

  TrainReport report;
  report.config = config;
  report.init_seed = derive_seed(config.seed, "init");
  report.worker_of = assign_to_workers(augmented, config.workers);
  report.comm = communication_size(g, p, augmented, config.layers, g.feature_dim());
  attribute_to_workers(report.comm, report.worker_of, config.workers);

  std::vector<PreparedSubgraph> subgraphs;
  std::vector<double> zeta_of;
  for (std::size_t i = 0; i < augmented.size(); ++i) {
    subgraphs.push_back(prepare(g, augmented[i].view));
    ZetaOptions zo = config.zeta;
    zo.seed = derive_seed(config.seed, "zeta", i);
    report.zetas.push_back(zeta(augmented[i].view, g.features(), zo));
    zeta_of.push_back(config.uniform_zeta ? 1.0 : report.zetas.back().zeta);
  }

  std::vector<std::vector<std::size_t>> queue(static_cast<std::size_t>(config.workers));
  for (std::size_t i = 0; i < augmented.size(); ++i) queue[report.worker_of[i]].push_back(i);
  std::size_t rounds = 0;
  for (const auto& q : queue) rounds = std::max(rounds, q.size());

  const FullGraph full{normalized_adjacency<double>(g),
                       gather_sparse_rows(g.features(), whole_graph_view(g).local_ids())};
  const auto dims = layer_dims(g.feature_dim(), config.hidden, g.num_classes(), config.layers);
  std::vector<GcnParams<double>> replicas(static_cast<std::size_t>(config.workers),
                                          glorot_init<double>(dims, report.init_seed));

  const Evaluation initial = evaluate_full(replicas[0], g, full);
  report.initial_val_acc = initial.val;
  report.initial_test_acc = initial.test;
  report.final_val_acc = initial.val;
  report.final_test_acc = initial.test;

  struct Step {
    Gradients<double> grads;
    double zeta = 1.0;
  };
  auto worker_step = [&](int w, std::size_t round) -> std::optional<Step> {
    const auto& q = queue[w];
    if (round >= q.size()) return std::nullopt;
    const auto& s = subgraphs[q[round]];
    if (!s.trainable) return std::nullopt;
    const auto cache = forward(replicas[w], s.adj, s.features);
    return Step{loss_and_backward(cache, replicas[w], s.adj, s.labels, s.loss_mask),
                zeta_of[q[round]]};
  };
  auto apply = [&](std::vector<Step>& steps) {
    if (steps.empty()) return;
    std::vector<Gradients<double>> grads;
    std::vector<double> zetas;
    for (auto& s : steps) {
      grads.push_back(std::move(s.grads));
      zetas.push_back(s.zeta);
    }
    const Gradients<double> reduced =
        config.weighted ? weighted_consensus<double>(grads, zetas) : plain_consensus<double>(grads);
    for (auto& r : replicas) r = sgd_update(r, reduced, config.eta);
    report.max_replica_divergence = std::max(report.max_replica_divergence, max_divergence(replicas));
    steps.clear();
  };

  double best_val = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.comm_bytes = report.comm.bytes_with();
    double loss_sum = 0.0;
    std::vector<Step> pending;
    for (std::size_t round = 0; round < rounds; ++round) {
      std::vector<std::future<std::optional<Step>>> futures;
      for (int w = 0; w < config.workers; ++w)
        futures.push_back(std::async(std::launch::async, worker_step, w, round));
      for (auto& f : futures) {
        auto step = f.get();
        if (!step) continue;
        loss_sum += step->grads.loss;
        ++rec.steps;
        if (!std::isfinite(step->grads.loss)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch << ", round " << round;
          report.aborted = true;
          report.diagnostics = msg.str();
        }
        pending.push_back(std::move(*step));
      }
      if (report.aborted) break;
      if (config.consensus == ConsensusMode::kPerRound) apply(pending);
    }
    if (report.aborted) {
      rec.train_loss = rec.steps > 0 ? loss_sum / rec.steps : 0.0;
      report.epochs.push_back(rec);
      break;
    }
    apply(pending);
    rec.train_loss = rec.steps > 0 ? loss_sum / rec.steps : 0.0;

    const bool last = epoch + 1 == config.epochs;
    if (last || (config.eval_every > 0 && (epoch + 1) % config.eval_every == 0)) {
      const Evaluation e = evaluate_full(replicas[0], g, full);
      rec.val_acc = e.val;
      rec.test_acc = e.test;
      report.final_val_acc = e.val;
      report.final_test_acc = e.test;
      if (e.val > best_val) {
        best_val = e.val;
        report.best_val_epoch = epoch;
      }
    }
    if (config.timing)
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.epochs.push_back(rec);
  }
  report.params = replicas[0];
  return report;
}

}  // namespace gad
