#pragma once

#include "gad/augment.hpp"
#include "gad/consensus.hpp"
#include "gad/gcn.hpp"
#include "gad/graph.hpp"
#include "gad/partition.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gad {

using SparseFeatures = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Rows `ids` of a dense feature matrix as a sparse matrix (zeros dropped).
SparseFeatures gather_sparse_rows(const Eigen::MatrixXd& features, std::span<const NodeId> ids);

/// Remote nodes a partition must fetch every epoch: the nodes outside the
/// part within `layers` hops of its boundary, minus its local replicas in the
/// "with augmentation" mode. Bytes are count * feature_dim * 4.
struct CommMetrics {
  std::int64_t feature_dim = 0;
  std::vector<std::int64_t> remote_without;  // per part
  std::vector<std::int64_t> remote_with;
  std::vector<std::int64_t> worker_remote_without;  // per worker, when known
  std::vector<std::int64_t> worker_remote_with;

  std::int64_t bytes_without() const;
  std::int64_t bytes_with() const;
  /// 1 - with / without, 0 when nothing is fetched.
  double reduction() const;
};

CommMetrics communication_size(const Graph& g, const Partitioning& p,
                               std::span<const AugmentedSubgraph> augmented, int layers,
                               std::int64_t feature_dim);

/// Adds per-worker sums given each part's worker.
void attribute_to_workers(CommMetrics& metrics, std::span<const int> worker_of, int num_workers);

enum class ConsensusMode { kPerRound, kPerEpoch };

std::string to_string(ConsensusMode mode);
ConsensusMode consensus_mode_from_string(const std::string& name);

struct TrainConfig {
  int layers = 2;
  int hidden = 16;
  double eta = 1e-4;
  int epochs = 200;
  bool weighted = true;
  bool uniform_zeta = false;  // every zeta forced to 1
  ConsensusMode consensus = ConsensusMode::kPerRound;
  ZetaOptions zeta;
  int workers = 1;
  std::uint64_t seed = 0;
  int eval_every = 1;   // 0: evaluate only before and after training
  bool timing = false;  // record wall time per epoch
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean over the subgraph steps of the epoch
  int steps = 0;
  std::optional<double> val_acc;
  std::optional<double> test_acc;
  std::int64_t comm_bytes = 0;
  std::optional<double> wall_seconds;
};

struct TrainReport {
  TrainConfig config;
  std::uint64_t init_seed = 0;
  std::vector<SubgraphWeight> zetas;  // per subgraph
  std::vector<int> worker_of;
  CommMetrics comm;
  double initial_val_acc = 0.0;
  double initial_test_acc = 0.0;
  std::vector<EpochRecord> epochs;
  double final_val_acc = 0.0;
  double final_test_acc = 0.0;
  int best_val_epoch = -1;
  double max_replica_divergence = 0.0;
  bool aborted = false;
  std::string diagnostics;
  GcnParams<double> params;
};

/// Simulated synchronous data-parallel training. Subgraphs go to workers via
/// assign_to_workers; each round every worker steps on its next subgraph
/// (loss over owned training nodes only), the coordinator reduces the
/// gradients in worker order with the round's zetas (or a plain mean) and
/// every worker applies the same SGD update. A non-finite loss stops
/// training and sets `aborted`.
TrainReport train(const Graph& g, const Partitioning& p,
                  std::span<const AugmentedSubgraph> augmented, const TrainConfig& config);

/// Full-graph forward, argmax against labels over `mask`.
double evaluate(const GcnParams<double>& params, const Graph& g, const Mask& mask);
double accuracy(const Matrix<double>& probs, std::span<const int> labels, const Mask& mask);

}  // namespace gad
