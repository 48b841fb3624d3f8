#pragma once

#include "gad/augment.hpp"
#include "gad/consensus.hpp"
#include "gad/dataset.hpp"
#include "gad/partition.hpp"
#include "gad/runtime.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gad {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every pipeline setting. Serialized with the field names below; unknown
/// keys are rejected.
struct Config {
  std::string dataset;  // directory holding edges/features
  std::array<double, 3> split{0.45, 0.18, 0.37};
  bool normalize_features = true;

  int k = 4;
  std::optional<int> target_subgraph_nodes;  // when set, k = ceil(|V| / target)
  double epsilon = 0.05;
  int restarts = 8;
  double target_fraction = 0.2;

  bool augment = true;
  double alpha = 0.01;
  double z_c = 1.96;
  double err_target = 0.05;
  ImportanceMode importance_mode = ImportanceMode::kIndicator;
  std::size_t max_walks = 1'000'000;

  int layers = 2;
  int hidden = 16;
  double eta = 1e-4;
  int epochs = 200;
  bool weighted = true;
  bool uniform_zeta = false;
  ConsensusMode consensus = ConsensusMode::kPerRound;
  double beta = 1.0;
  std::size_t pair_cap = 4096;
  ZetaDistance zeta_distance = ZetaDistance::kL2;
  int workers = 4;
  int eval_every = 1;
  bool timing = false;

  std::uint64_t seed = 0;
};

/// Throws ConfigError naming the first field out of range.
void validate(const Config& c);

nlohmann::json to_json(const Config& c);
/// Overlays the keys present in `j` onto `base`.
Config config_from_json(const nlohmann::json& j, Config base = {});
Config load_config(const std::string& path);

/// k after applying target_subgraph_nodes to a graph of `num_nodes`.
int effective_k(const Config& c, NodeId num_nodes);

LoadOptions load_options(const Config& c);
PartitionOptions partition_options(const Config& c, NodeId num_nodes);
AugmentOptions augment_options(const Config& c);
TrainConfig train_config(const Config& c);

}  // namespace gad
