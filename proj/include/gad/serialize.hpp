#pragma once

#include "gad/augment.hpp"
#include "gad/gcn.hpp"
#include "gad/graph.hpp"
#include "gad/partition.hpp"
#include "gad/runtime.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace gad {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"k", "epsilon", "edge_cut", "restarts_used", "cap", "balanced",
///  "part_sizes", "warnings", "assignment"}
nlohmann::json to_json(const Partitioning& p);
/// Validates the assignment against a graph of `num_nodes`.
Partitioning partitioning_from_json(const nlohmann::json& j, NodeId num_nodes);

nlohmann::json to_json(const ImportanceTable& t);
ImportanceTable importance_from_json(const nlohmann::json& j);

/// Global node ids, owned flags, replica sources, edge list, budget and the
/// importance table of one augmented subgraph.
nlohmann::json to_json(const AugmentedSubgraph& a);
/// Rebuilds the subgraph from `g` and `p` and checks the stored node set and
/// edge count against it.
AugmentedSubgraph augmented_from_json(const nlohmann::json& j, const Graph& g,
                                      const Partitioning& p);

nlohmann::json to_json(const CommMetrics& m);
nlohmann::json to_json(const TrainReport& r);

/// JSON shape header line, then the weights as raw little-endian doubles
/// (each matrix column-major, layer by layer).
void save_params(const GcnParams<double>& params, const std::filesystem::path& path);
GcnParams<double> load_params(const std::filesystem::path& path);

/// Pretty-printed with a trailing newline.
void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace gad
