#include "gad/augment.hpp"
#include "gad/config.hpp"
#include "gad/dataset.hpp"
#include "gad/partition.hpp"
#include "gad/report.hpp"
#include "gad/runtime.hpp"
#include "gad/serialize.hpp"
#include "gad/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUserError = 1, kNumericalFailure = 2 };

// Flags override the --config file, which overrides the config recorded in the
// upstream artifact, which overrides the defaults. Each flag is bound to a
// scratch variable and copied into the Config only when given.
class Overrides {
 public:
  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& help,
           std::function<void(gad::Config&, const T&)> apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    entries_.push_back([opt, value, apply](gad::Config& c) {
      if (opt->count() > 0) apply(c, *value);
    });
  }

  void apply(gad::Config& c) const {
    for (const auto& e : entries_) e(c);
  }

 private:
  std::vector<std::function<void(gad::Config&)>> entries_;
};

struct Common {
  std::string config_file;
  std::string dataset;
  std::string out;
  Overrides overrides;
};

void add_common(CLI::App* cmd, Common& common, const std::string& default_out) {
  cmd->add_option("--config", common.config_file, "JSON config file");
  cmd->add_option("dataset", common.dataset, "dataset directory (overrides config)");
  common.out = default_out;
  cmd->add_option("--out,-o", common.out, "output file")->capture_default_str();
  auto& o = common.overrides;
  o.add<std::uint64_t>(cmd, "--seed", "master seed", [](auto& c, auto v) { c.seed = v; });
  o.add<bool>(cmd, "--normalize-features", "unit L1 feature rows",
              [](auto& c, auto v) { c.normalize_features = v; });
  o.add<std::vector<double>>(cmd, "--split", "train val test fractions", [](auto& c, auto v) {
    if (v.size() != 3) throw gad::ConfigError("--split takes three fractions");
    c.split = {v[0], v[1], v[2]};
  });
}

void add_partition_flags(CLI::App* cmd, Overrides& o) {
  o.add<int>(cmd, "--k", "number of parts", [](auto& c, auto v) { c.k = v; });
  o.add<int>(cmd, "--target-subgraph-nodes", "choose k as ceil(|V| / nodes)",
             [](auto& c, auto v) { c.target_subgraph_nodes = v; });
  o.add<double>(cmd, "--epsilon", "balance tolerance", [](auto& c, auto v) { c.epsilon = v; });
  o.add<int>(cmd, "--restarts", "region-growing restarts", [](auto& c, auto v) { c.restarts = v; });
  o.add<double>(cmd, "--target-fraction", "coarsening stop fraction",
                [](auto& c, auto v) { c.target_fraction = v; });
}

void add_augment_flags(CLI::App* cmd, Overrides& o) {
  o.add<bool>(cmd, "--augment", "replicate important remote nodes",
              [](auto& c, auto v) { c.augment = v; });
  o.add<double>(cmd, "--alpha", "replication budget factor", [](auto& c, auto v) { c.alpha = v; });
  o.add<double>(cmd, "--z-c", "confidence z value", [](auto& c, auto v) { c.z_c = v; });
  o.add<double>(cmd, "--err-target", "Monte-Carlo error target",
                [](auto& c, auto v) { c.err_target = v; });
  o.add<std::string>(cmd, "--importance-mode", "indicator | multiplicity", [](auto& c, auto v) {
    c.importance_mode = gad::importance_mode_from_string(v);
  });
  o.add<std::size_t>(cmd, "--max-walks", "cap on walks per part",
                     [](auto& c, auto v) { c.max_walks = v; });
  o.add<int>(cmd, "--layers", "GCN layers (also the halo radius)",
             [](auto& c, auto v) { c.layers = v; });
}

void add_train_flags(CLI::App* cmd, Overrides& o) {
  o.add<int>(cmd, "--hidden", "hidden units", [](auto& c, auto v) { c.hidden = v; });
  o.add<double>(cmd, "--eta", "learning rate", [](auto& c, auto v) { c.eta = v; });
  o.add<int>(cmd, "--epochs", "training epochs", [](auto& c, auto v) { c.epochs = v; });
  o.add<bool>(cmd, "--weighted", "zeta-weighted consensus", [](auto& c, auto v) { c.weighted = v; });
  o.add<bool>(cmd, "--uniform-zeta", "force every zeta to 1",
              [](auto& c, auto v) { c.uniform_zeta = v; });
  o.add<std::string>(cmd, "--consensus", "per_round | per_epoch", [](auto& c, auto v) {
    c.consensus = gad::consensus_mode_from_string(v);
  });
  o.add<double>(cmd, "--beta", "zeta denominator offset", [](auto& c, auto v) { c.beta = v; });
  o.add<std::size_t>(cmd, "--pair-cap", "exact zeta up to this many nodes",
                     [](auto& c, auto v) { c.pair_cap = v; });
  o.add<std::string>(cmd, "--zeta-distance", "l2 | per_dim_mean", [](auto& c, auto v) {
    c.zeta_distance = gad::zeta_distance_from_string(v);
  });
  o.add<int>(cmd, "--workers", "simulated workers", [](auto& c, auto v) { c.workers = v; });
  o.add<int>(cmd, "--eval-every", "epochs between evaluations (0: end only)",
             [](auto& c, auto v) { c.eval_every = v; });
  o.add<bool>(cmd, "--timing", "record wall time per epoch", [](auto& c, auto v) { c.timing = v; });
}

gad::Config resolve(const Common& common, const json* upstream) {
  gad::Config c;
  if (upstream != nullptr && upstream->contains("config"))
    c = gad::config_from_json(upstream->at("config"));
  if (!common.config_file.empty()) c = gad::config_from_json(gad::read_json(common.config_file), c);
  if (!common.dataset.empty()) c.dataset = common.dataset;
  common.overrides.apply(c);
  gad::validate(c);
  if (c.dataset.empty()) throw gad::ConfigError("no dataset given");
  return c;
}

gad::Graph load(const gad::Config& c) {
  return gad::load_dataset(gad::locate_dataset(c.dataset), gad::load_options(c)).graph;
}

int cmd_partition(const Common& common) {
  const gad::Config c = resolve(common, nullptr);
  const gad::Graph g = load(c);
  const gad::Partitioning p = gad::partition_graph(g, gad::partition_options(c, g.num_nodes()));
  json doc = gad::to_json(p);
  doc["config"] = gad::to_json(c);
  doc["node_names"] = g.node_names();
  gad::write_json(doc, common.out);
  std::cout << "parts " << p.k << "  edge_cut " << p.edge_cut << "  balanced "
            << (gad::is_balanced(p) ? "yes" : "no") << "  restarts_used " << p.restarts_used
            << "  sizes " << json(p.part_sizes()).dump() << '\n';
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

int cmd_augment(const Common& common, const std::string& partition_file) {
  const json upstream = gad::read_json(partition_file);
  const gad::Config c = resolve(common, &upstream);
  const gad::Graph g = load(c);
  const gad::Partitioning p = gad::partitioning_from_json(upstream, g.num_nodes());
  const auto subgraphs = gad::augment_partitions(g, p, gad::augment_options(c));
  json doc;
  doc["config"] = gad::to_json(c);
  doc["partition"] = gad::to_json(p);
  doc["worker_of"] = gad::assign_to_workers(subgraphs, c.workers);
  json list = json::array();
  std::size_t replicas = 0, budget = 0;
  for (const auto& s : subgraphs) {
    list.push_back(gad::to_json(s));
    replicas += static_cast<std::size_t>(s.num_replicas());
    budget += s.budget;
  }
  doc["subgraphs"] = std::move(list);
  gad::write_json(doc, common.out);
  std::cout << "subgraphs " << subgraphs.size() << "  replicas " << replicas << "  budget "
            << budget << "  alpha " << c.alpha << '\n';
  return kOk;
}

int cmd_train(const Common& common, const std::string& augmented_file, const std::string& csv,
              const std::string& checkpoint) {
  const json upstream = gad::read_json(augmented_file);
  const gad::Config c = resolve(common, &upstream);
  const gad::Graph g = load(c);
  gad::Partitioning p;
  std::vector<gad::AugmentedSubgraph> subgraphs;
  try {
    p = gad::partitioning_from_json(upstream.at("partition"), g.num_nodes());
    for (const auto& s : upstream.at("subgraphs")) subgraphs.push_back(gad::augmented_from_json(s, g, p));
  } catch (const json::exception& e) {
    throw gad::FormatError(std::string("malformed augmented file: ") + e.what());
  }
  const gad::TrainReport r = gad::train(g, p, subgraphs, gad::train_config(c));
  json doc;
  doc["config"] = gad::to_json(c);
  doc["report"] = gad::to_json(r);
  gad::write_json(doc, common.out);
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << "epoch,train_loss,val_acc,test_acc,comm_bytes\n";
    for (const auto& e : r.epochs)
      out << e.epoch << ',' << json(e.train_loss).dump() << ','
          << (e.val_acc ? json(*e.val_acc).dump() : "") << ','
          << (e.test_acc ? json(*e.test_acc).dump() : "") << ',' << e.comm_bytes << '\n';
  }
  if (!checkpoint.empty()) gad::save_params(r.params, checkpoint);
  if (r.aborted) {
    std::cerr << "error: " << r.diagnostics << '\n';
    return kNumericalFailure;
  }
  std::cout << "epochs " << r.epochs.size() << "  val_acc " << r.final_val_acc << "  test_acc "
            << r.final_test_acc << "  comm_bytes " << r.comm.bytes_with() << " (without "
            << r.comm.bytes_without() << ")\n";
  return kOk;
}

int cmd_report(const std::vector<std::string>& files, const std::string& csv) {
  std::vector<gad::ReportRow> rows;
  for (const auto& f : files) rows.push_back(gad::summarize_report(gad::read_json(f), fs::path(f).stem().string()));
  std::cout << gad::format_table(rows);
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << gad::to_csv(rows);
  }
  return kOk;
}

struct GenerateArgs {
  std::string kind = "sbm";
  std::string out;
  std::optional<gad::NodeId> nodes;  // generator default when unset
  int blocks = 2;
  double p_in = 0.05;
  double p_out = 0.005;
  int dim = 16;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a) {
  gad::Graph g;
  if (a.kind == "sbm") {
    gad::SbmSpec s;
    s.num_nodes = a.nodes.value_or(s.num_nodes);
    s.num_blocks = a.blocks;
    s.p_in = a.p_in;
    s.p_out = a.p_out;
    s.feature_dim = a.dim;
    s.seed = a.seed;
    g = gad::stochastic_block_model(s);
  } else if (a.kind == "citation") {
    gad::CitationLikeSpec s;
    s.num_nodes = a.nodes.value_or(s.num_nodes);
    s.seed = a.seed;
    g = gad::citation_like_graph(s);
  } else {
    throw gad::ConfigError("unknown generator: " + a.kind);
  }
  fs::create_directories(a.out);
  gad::write_native_dataset(g, a.out);
  std::cout << "nodes " << g.num_nodes() << "  edges " << g.num_edges() << "  dim "
            << g.feature_dim() << "  classes " << g.num_classes() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioning, halo augmentation and simulated distributed GCN training"};
  app.require_subcommand(1);

  Common partition_common, augment_common, train_common;
  auto* partition = app.add_subcommand("partition", "partition a dataset");
  add_common(partition, partition_common, "partition.json");
  add_partition_flags(partition, partition_common.overrides);

  std::string partition_file;
  auto* augment = app.add_subcommand("augment", "select replicas for every part");
  add_common(augment, augment_common, "augmented.json");
  augment->add_option("--partition", partition_file, "partition JSON")->required();
  add_augment_flags(augment, augment_common.overrides);
  augment_common.overrides.add<int>(augment, "--workers", "simulated workers",
                                    [](auto& c, auto v) { c.workers = v; });

  std::string augmented_file, curves_csv, checkpoint;
  auto* train = app.add_subcommand("train", "train on augmented subgraphs");
  add_common(train, train_common, "report.json");
  train->add_option("--augmented", augmented_file, "augmented-subgraphs JSON")->required();
  train->add_option("--csv", curves_csv, "per-epoch curves CSV");
  train->add_option("--checkpoint", checkpoint, "write final parameters here");
  train_common.overrides.add<int>(train, "--layers", "GCN layers",
                                  [](auto& c, auto v) { c.layers = v; });
  add_train_flags(train, train_common.overrides);

  std::vector<std::string> report_files;
  std::string report_csv;
  auto* report = app.add_subcommand("report", "compare train reports");
  report->add_option("reports", report_files, "report JSON files")->required();
  report->add_option("--csv", report_csv, "write the table as CSV");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--kind", gen.kind, "sbm | citation")->capture_default_str();
  generate->add_option("out", gen.out, "output directory")->required();
  generate->add_option("--nodes", gen.nodes, "node count (400 for sbm, 2708 for citation)");
  generate->add_option("--blocks", gen.blocks)->capture_default_str();
  generate->add_option("--p-in", gen.p_in)->capture_default_str();
  generate->add_option("--p-out", gen.p_out)->capture_default_str();
  generate->add_option("--dim", gen.dim)->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (*partition) return cmd_partition(partition_common);
    if (*augment) return cmd_augment(augment_common, partition_file);
    if (*train) return cmd_train(train_common, augmented_file, curves_csv, checkpoint);
    if (*report) return cmd_report(report_files, report_csv);
    if (*generate) return cmd_generate(gen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUserError;
  }
  return kUserError;
}
