#include "gad/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace gad {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

void validate(const Config& c) {
  double split_sum = 0.0;
  for (double f : c.split) {
    require(f >= 0.0 && f <= 1.0, "split fractions must lie in [0, 1]");
    split_sum += f;
  }
  require(split_sum <= 1.0 + 1e-9, "split fractions must sum to <= 1");
  require(c.k >= 1, "k must be >= 1");
  require(!c.target_subgraph_nodes || *c.target_subgraph_nodes >= 1,
          "target_subgraph_nodes must be >= 1");
  require(c.epsilon >= 0.0, "epsilon must be >= 0");
  require(c.restarts >= 1, "restarts must be >= 1");
  require(c.target_fraction > 0.0 && c.target_fraction < 1.0, "target_fraction must be in (0, 1)");
  require(c.alpha > 0.0, "alpha must be > 0");
  require(c.z_c > 0.0, "z_c must be > 0");
  require(c.err_target > 0.0 && c.err_target < 1.0, "err_target must be in (0, 1)");
  require(c.max_walks >= 1, "max_walks must be >= 1");
  require(c.layers >= 1, "layers must be >= 1");
  require(c.hidden >= 1, "hidden must be >= 1");
  require(c.eta > 0.0 && std::isfinite(c.eta), "eta must be > 0");
  require(c.epochs >= 0, "epochs must be >= 0");
  require(c.beta > 0.0, "beta must be > 0");
  require(c.pair_cap >= 2, "pair_cap must be >= 2");
  require(c.workers >= 1, "workers must be >= 1");
  require(c.eval_every >= 0, "eval_every must be >= 0");
}

nlohmann::json to_json(const Config& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset;
  j["split"] = c.split;
  j["normalize_features"] = c.normalize_features;
  j["k"] = c.k;
  j["target_subgraph_nodes"] =
      c.target_subgraph_nodes ? nlohmann::json(*c.target_subgraph_nodes) : nlohmann::json(nullptr);
  j["epsilon"] = c.epsilon;
  j["restarts"] = c.restarts;
  j["target_fraction"] = c.target_fraction;
  j["augment"] = c.augment;
  j["alpha"] = c.alpha;
  j["z_c"] = c.z_c;
  j["err_target"] = c.err_target;
  j["importance_mode"] = to_string(c.importance_mode);
  j["max_walks"] = c.max_walks;
  j["layers"] = c.layers;
  j["hidden"] = c.hidden;
  j["eta"] = c.eta;
  j["epochs"] = c.epochs;
  j["weighted"] = c.weighted;
  j["uniform_zeta"] = c.uniform_zeta;
  j["consensus"] = to_string(c.consensus);
  j["beta"] = c.beta;
  j["pair_cap"] = c.pair_cap;
  j["zeta_distance"] = to_string(c.zeta_distance);
  j["workers"] = c.workers;
  j["eval_every"] = c.eval_every;
  j["timing"] = c.timing;
  j["seed"] = c.seed;
  return j;
}

Config config_from_json(const nlohmann::json& j, Config c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = [] {
    std::set<std::string> keys;
    const nlohmann::json defaults = to_json(Config{});
    for (const auto& [key, value] : defaults.items()) keys.insert(key);
    return keys;
  }();
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key: " + key);
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("dataset", c.dataset);
    get("split", c.split);
    get("normalize_features", c.normalize_features);
    get("k", c.k);
    if (j.contains("target_subgraph_nodes")) {
      const auto& t = j.at("target_subgraph_nodes");
      c.target_subgraph_nodes = t.is_null() ? std::nullopt : std::optional<int>(t.get<int>());
    }
    get("epsilon", c.epsilon);
    get("restarts", c.restarts);
    get("target_fraction", c.target_fraction);
    get("augment", c.augment);
    get("alpha", c.alpha);
    get("z_c", c.z_c);
    get("err_target", c.err_target);
    if (j.contains("importance_mode"))
      c.importance_mode = importance_mode_from_string(j.at("importance_mode").get<std::string>());
    get("max_walks", c.max_walks);
    get("layers", c.layers);
    get("hidden", c.hidden);
    get("eta", c.eta);
    get("epochs", c.epochs);
    get("weighted", c.weighted);
    get("uniform_zeta", c.uniform_zeta);
    if (j.contains("consensus"))
      c.consensus = consensus_mode_from_string(j.at("consensus").get<std::string>());
    get("beta", c.beta);
    get("pair_cap", c.pair_cap);
    if (j.contains("zeta_distance"))
      c.zeta_distance = zeta_distance_from_string(j.at("zeta_distance").get<std::string>());
    get("workers", c.workers);
    get("eval_every", c.eval_every);
    get("timing", c.timing);
    get("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

int effective_k(const Config& c, NodeId num_nodes) {
  if (!c.target_subgraph_nodes) return c.k;
  const int t = *c.target_subgraph_nodes;
  return std::max(1, static_cast<int>((num_nodes + t - 1) / t));
}

LoadOptions load_options(const Config& c) {
  LoadOptions o;
  o.split.fractions = c.split;
  o.seed = c.seed;
  o.normalize_features = c.normalize_features;
  return o;
}

PartitionOptions partition_options(const Config& c, NodeId num_nodes) {
  PartitionOptions o;
  o.k = effective_k(c, num_nodes);
  o.epsilon = c.epsilon;
  o.restarts = c.restarts;
  o.target_fraction = c.target_fraction;
  o.seed = c.seed;
  return o;
}

AugmentOptions augment_options(const Config& c) {
  AugmentOptions o;
  o.enabled = c.augment;
  o.layers = c.layers;
  o.alpha = c.alpha;
  o.importance.z_c = c.z_c;
  o.importance.err_target = c.err_target;
  o.importance.mode = c.importance_mode;
  o.importance.max_walks = c.max_walks;
  o.seed = c.seed;
  return o;
}

TrainConfig train_config(const Config& c) {
  TrainConfig t;
  t.layers = c.layers;
  t.hidden = c.hidden;
  t.eta = c.eta;
  t.epochs = c.epochs;
  t.weighted = c.weighted;
  t.uniform_zeta = c.uniform_zeta;
  t.consensus = c.consensus;
  t.zeta.beta = c.beta;
  t.zeta.pair_cap = c.pair_cap;
  t.zeta.distance = c.zeta_distance;
  t.workers = c.workers;
  t.seed = c.seed;
  t.eval_every = c.eval_every;
  t.timing = c.timing;
  return t;
}

}  // namespace gad
