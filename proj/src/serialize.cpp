#include "gad/serialize.hpp"

#include <bit>
#include <fstream>

namespace gad {

using nlohmann::json;

json to_json(const Partitioning& p) {
  json j;
  j["k"] = p.k;
  j["epsilon"] = p.epsilon;
  j["edge_cut"] = p.edge_cut;
  j["restarts_used"] = p.restarts_used;
  j["cap"] = balance_cap(static_cast<Weight>(p.assignment.size()), p.k, p.epsilon);
  j["balanced"] = is_balanced(p);
  j["part_sizes"] = p.part_sizes();
  j["warnings"] = p.warnings;
  j["assignment"] = p.assignment;
  return j;
}

Partitioning partitioning_from_json(const json& j, NodeId num_nodes) {
  Partitioning p;
  try {
    p.k = j.at("k").get<int>();
    p.epsilon = j.at("epsilon").get<double>();
    p.edge_cut = j.at("edge_cut").get<std::int64_t>();
    p.restarts_used = j.value("restarts_used", 0);
    p.warnings = j.value("warnings", std::vector<std::string>{});
    p.assignment = j.at("assignment").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed partition: ") + e.what());
  }
  if (p.k < 1) throw FormatError("partition k must be >= 1");
  if (static_cast<NodeId>(p.assignment.size()) != num_nodes)
    throw FormatError("partition covers " + std::to_string(p.assignment.size()) +
                      " nodes, dataset has " + std::to_string(num_nodes));
  for (int a : p.assignment)
    if (a < 0 || a >= p.k) throw FormatError("partition assignment out of range");
  return p;
}

json to_json(const ImportanceTable& t) {
  json j;
  j["mode"] = to_string(t.mode);
  j["walk_count"] = t.walk_count;
  j["z_c"] = t.z_c;
  j["err_target"] = t.err_target;
  j["sigma"] = t.sigma;
  j["mean"] = t.mean;
  j["nodes"] = t.nodes;
  j["values"] = t.values;
  return j;
}

ImportanceTable importance_from_json(const json& j) {
  ImportanceTable t;
  t.mode = importance_mode_from_string(j.at("mode").get<std::string>());
  t.walk_count = j.at("walk_count").get<std::size_t>();
  t.z_c = j.at("z_c").get<double>();
  t.err_target = j.at("err_target").get<double>();
  t.sigma = j.at("sigma").get<double>();
  t.mean = j.at("mean").get<double>();
  t.nodes = j.at("nodes").get<std::vector<NodeId>>();
  t.values = j.at("values").get<std::vector<double>>();
  if (t.nodes.size() != t.values.size()) throw FormatError("importance table size mismatch");
  return t;
}

json to_json(const AugmentedSubgraph& a) {
  const auto& v = a.view;
  json j;
  j["part"] = a.part;
  j["num_owned"] = v.num_owned();
  j["num_replicas"] = a.num_replicas();
  j["budget"] = a.budget;
  j["shortfall"] = a.shortfall;
  j["candidates"] = a.candidate_count;
  j["phase_one_walks"] = a.phase_one_walks;
  j["nodes"] = std::vector<NodeId>(v.local_ids().begin(), v.local_ids().end());
  std::vector<bool> owned(v.owned_mask().begin(), v.owned_mask().end());
  j["owned"] = owned;
  j["replicas"] = std::vector<NodeId>(v.local_ids().begin() + v.num_owned(), v.local_ids().end());
  j["replica_sources"] = a.replica_source;
  json edges = json::array();
  for (NodeId u = 0; u < v.num_nodes(); ++u)
    for (NodeId w : v.neighbors(u))
      if (u < w) edges.push_back({v.global_id(u), v.global_id(w)});
  j["edges"] = std::move(edges);
  j["importance"] = to_json(a.importance);
  return j;
}

AugmentedSubgraph augmented_from_json(const json& j, const Graph& g, const Partitioning& p) {
  try {
    const int part = j.at("part").get<int>();
    if (part < 0 || part >= p.k) throw FormatError("subgraph part out of range");
    const auto replicas = j.at("replicas").get<std::vector<NodeId>>();
    AugmentedSubgraph a = augment_subgraph(g, p, part, replicas);
    const auto nodes = j.at("nodes").get<std::vector<NodeId>>();
    if (nodes != std::vector<NodeId>(a.view.local_ids().begin(), a.view.local_ids().end()))
      throw FormatError("subgraph " + std::to_string(part) + " node set does not match partition");
    if (static_cast<EdgeIndex>(j.at("edges").size()) != a.view.num_edges())
      throw FormatError("subgraph " + std::to_string(part) + " edge count does not match graph");
    a.budget = j.at("budget").get<std::size_t>();
    a.shortfall = j.at("shortfall").get<std::size_t>();
    a.candidate_count = j.at("candidates").get<std::size_t>();
    a.phase_one_walks = j.at("phase_one_walks").get<std::size_t>();
    a.importance = importance_from_json(j.at("importance"));
    return a;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed augmented subgraph: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(std::string("malformed augmented subgraph: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed augmented subgraph: ") + e.what());
  }
}

json to_json(const CommMetrics& m) {
  json j;
  j["feature_dim"] = m.feature_dim;
  j["remote_without"] = m.remote_without;
  j["remote_with"] = m.remote_with;
  j["worker_remote_without"] = m.worker_remote_without;
  j["worker_remote_with"] = m.worker_remote_with;
  j["bytes_without"] = m.bytes_without();
  j["bytes_with"] = m.bytes_with();
  j["reduction"] = m.reduction();
  return j;
}

json to_json(const TrainReport& r) {
  auto optional = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json j;
  j["init_seed"] = r.init_seed;
  j["evaluation"] = "full_graph";
  j["worker_of"] = r.worker_of;
  json zetas = json::array();
  for (const auto& z : r.zetas)
    zetas.push_back({{"zeta", z.zeta},
                     {"pair_probability_sum", z.pair_probability_sum},
                     {"mean_distance", z.mean_distance},
                     {"beta", z.beta},
                     {"pairs_used", z.pairs_used},
                     {"sampled", z.sampled}});
  j["zetas"] = std::move(zetas);
  j["comm"] = to_json(r.comm);
  j["initial_val_acc"] = r.initial_val_acc;
  j["initial_test_acc"] = r.initial_test_acc;
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    json row{{"epoch", e.epoch},
             {"train_loss", e.train_loss},
             {"steps", e.steps},
             {"val_acc", optional(e.val_acc)},
             {"test_acc", optional(e.test_acc)},
             {"comm_bytes", e.comm_bytes}};
    if (e.wall_seconds) row["wall_seconds"] = *e.wall_seconds;
    epochs.push_back(std::move(row));
  }
  j["epochs"] = std::move(epochs);
  j["final_val_acc"] = r.final_val_acc;
  j["final_test_acc"] = r.final_test_acc;
  j["best_val_epoch"] = r.best_val_epoch;
  j["max_replica_divergence"] = r.max_replica_divergence;
  j["aborted"] = r.aborted;
  j["diagnostics"] = r.diagnostics;
  return j;
}

void save_params(const GcnParams<double>& params, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "blob layout assumes little-endian");
  json header;
  header["dims"] = params.dims();
  header["seed"] = params.seed;
  header["scheme"] = params.scheme;
  header["scalar"] = "f64";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const auto& w : params.weights)
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
}

GcnParams<double> load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  GcnParams<double> p;
  std::vector<Eigen::Index> dims;
  try {
    const json header = json::parse(line);
    if (header.at("scalar").get<std::string>() != "f64") throw FormatError("unsupported scalar");
    dims = header.at("dims").get<std::vector<Eigen::Index>>();
    p.seed = header.at("seed").get<std::uint64_t>();
    p.scheme = header.at("scheme").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Matrix<double> w(dims[l], dims[l + 1]);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    if (!in) throw FormatError("checkpoint truncated");
    p.weights.push_back(std::move(w));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint has trailing bytes");
  return p;
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace gad
