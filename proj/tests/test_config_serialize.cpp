#include "fixtures.hpp"
#include "gad/config.hpp"
#include "gad/serialize.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace gad;
using namespace fixtures;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("gad_cfg_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("config defaults") {
  const Config c;
  CHECK(c.k == 4);
  CHECK(c.epsilon == 0.05);
  CHECK(c.alpha == 0.01);
  CHECK(c.z_c == 1.96);
  CHECK(c.err_target == 0.05);
  CHECK(c.beta == 1.0);
  CHECK(c.eta == 1e-4);
  CHECK(c.layers == 2);
  CHECK(c.hidden == 16);
  CHECK(c.split == std::array<double, 3>{0.45, 0.18, 0.37});
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config json round trip and overlay") {
  Config c;
  c.k = 9;
  c.target_subgraph_nodes = 128;
  c.importance_mode = ImportanceMode::kMultiplicity;
  c.consensus = ConsensusMode::kPerEpoch;
  c.zeta_distance = ZetaDistance::kPerDimMean;
  c.seed = 123456789012345ULL;
  const Config back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));

  const Config over = config_from_json(json{{"alpha", 0.2}}, c);
  CHECK(over.alpha == 0.2);
  CHECK(over.k == 9);
  CHECK_FALSE(config_from_json(json{{"target_subgraph_nodes", nullptr}}, c).target_subgraph_nodes);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(config_from_json(json{{"learning_rate", 0.1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"k", "four"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"consensus", "async"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
  Config c;
  c.alpha = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = Config{};
  c.split = {0.6, 0.3, 0.2};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = Config{};
  c.eta = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/gad.json"), ConfigError);
}

TEST_CASE("config file loading") {
  const auto path = temp_file("c.json");
  std::ofstream(path) << R"({"k": 3, "epochs": 5})";
  const Config c = load_config(path.string());
  CHECK(c.k == 3);
  CHECK(c.epochs == 5);
  std::ofstream(path) << "{not json";
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
  fs::remove(path);
}

TEST_CASE("target subgraph size sets k") {
  Config c;
  c.target_subgraph_nodes = 100;
  CHECK(effective_k(c, 2708) == 28);
  CHECK(effective_k(c, 50) == 1);
  CHECK(partition_options(c, 2708).k == 28);
  c.target_subgraph_nodes.reset();
  CHECK(effective_k(c, 2708) == 4);
}

TEST_CASE("config fans out to stage options") {
  Config c;
  c.layers = 3;
  c.alpha = 0.3;
  c.beta = 2.0;
  c.seed = 77;
  c.max_walks = 500;
  CHECK(augment_options(c).layers == 3);
  CHECK(augment_options(c).alpha == 0.3);
  CHECK(augment_options(c).importance.max_walks == 500);
  CHECK(train_config(c).zeta.beta == 2.0);
  CHECK(train_config(c).seed == 77);
  CHECK(load_options(c).seed == 77);
}

TEST_CASE("partitioning round trip") {
  Partitioning p = partition_of({0, 1, 1, 0, 2}, 3, 0.5);
  p.edge_cut = 4;
  p.restarts_used = 8;
  p.warnings = {"note"};
  const json j = to_json(p);
  CHECK(j.at("part_sizes") == json{2, 2, 1});
  const Partitioning back = partitioning_from_json(j, 5);
  CHECK(back.assignment == p.assignment);
  CHECK(back.k == 3);
  CHECK(back.edge_cut == 4);
  CHECK(back.warnings == p.warnings);
  CHECK_THROWS_AS(partitioning_from_json(j, 6), FormatError);
  json bad = j;
  bad["assignment"][0] = 5;
  CHECK_THROWS_AS(partitioning_from_json(bad, 5), FormatError);
}

TEST_CASE("augmented subgraph round trip") {
  const Graph g = erdos_renyi(40, 0.1, 4);
  const Partitioning p = partition_of(random_balanced(40, 2, 4), 2);
  AugmentOptions o;
  o.alpha = 0.3;
  o.seed = 4;
  const auto aug = augment_partitions(g, p, o);
  for (const auto& a : aug) {
    const json j = to_json(a);
    const AugmentedSubgraph back = augmented_from_json(j, g, p);
    CHECK(back.view.local_ids().size() == a.view.local_ids().size());
    CHECK(std::equal(a.view.local_ids().begin(), a.view.local_ids().end(),
                     back.view.local_ids().begin()));
    CHECK(back.view.owned_mask() == a.view.owned_mask());
    CHECK(back.replica_source == a.replica_source);
    CHECK(back.budget == a.budget);
    CHECK(back.importance.nodes == a.importance.nodes);
    CHECK(back.importance.values == a.importance.values);
    CHECK(to_json(back) == j);
  }
  json bad = to_json(aug[0]);
  bad["nodes"].push_back(bad["nodes"][0]);
  CHECK_THROWS_AS(augmented_from_json(bad, g, p), FormatError);
}

TEST_CASE("checkpoint round trip") {
  const auto params = glorot_init<double>(layer_dims(7, 5, 3, 3), 99);
  const auto path = temp_file("ckpt.bin");
  save_params(params, path);
  const auto back = load_params(path);
  REQUIRE(back.num_layers() == 3);
  for (std::size_t l = 0; l < 3; ++l) CHECK(back.weights[l] == params.weights[l]);

  // Cut the payload short.
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 8);
  CHECK_THROWS_AS(load_params(path), FormatError);
  fs::remove(path);
  CHECK_THROWS_AS(load_params(path), FormatError);
}

TEST_CASE("json files") {
  const auto path = temp_file("doc.json");
  write_json(json{{"a", 1}}, path);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.back() == '\n');
  CHECK(read_json(path) == json{{"a", 1}});
  std::ofstream(path) << "[1,";
  CHECK_THROWS_AS(read_json(path), FormatError);
  fs::remove(path);
}

TEST_CASE("train report json omits wall time unless recorded") {
  TrainReport r;
  EpochRecord e;
  e.train_loss = 1.5;
  r.epochs.push_back(e);
  json j = to_json(r);
  CHECK_FALSE(j.at("epochs")[0].contains("wall_seconds"));
  r.epochs[0].wall_seconds = 0.25;
  j = to_json(r);
  CHECK(j.at("epochs")[0].at("wall_seconds") == 0.25);
}
