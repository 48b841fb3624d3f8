#pragma once

#include "gad/graph.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace gad {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either train/val/test fractions of the labeled nodes (drawn by seeded
/// shuffle) or explicit masks.
struct SplitSpec {
  std::array<double, 3> fractions{0.45, 0.18, 0.37};
  std::optional<std::array<Mask, 3>> masks;
};

struct LoadOptions {
  SplitSpec split;
  std::uint64_t seed = 0;
  bool normalize_features = true;  // unit L1 rows
};

enum class FeatureFormat { kCora, kNative };

struct DatasetFiles {
  std::filesystem::path edges;
  std::filesystem::path features;
};

struct Dataset {
  Graph graph;
  FeatureFormat format = FeatureFormat::kNative;
  std::size_t edge_records = 0;  // non-comment lines in the edge file
  std::vector<std::string> class_names;
};

/// Resolves a dataset directory: `*.cites` + `*.content` (Cora layout) or
/// `edges.txt` + `features.txt` (native layout).
DatasetFiles locate_dataset(const std::filesystem::path& dir);

/// Loads an edge list and a feature file. The feature layout is detected from
/// its first non-empty line: a JSON header selects the native format,
/// anything else is read as Cora `.content` rows "id f_1 .. f_d label".
Dataset load_dataset(const std::filesystem::path& edge_path,
                     const std::filesystem::path& feature_path, const LoadOptions& options);
inline Dataset load_dataset(const DatasetFiles& files, const LoadOptions& options) {
  return load_dataset(files.edges, files.features, options);
}

/// Train/val/test masks over labeled nodes. Sizes are round(f * labeled),
/// trimmed so the three never exceed the labeled count.
std::array<Mask, 3> random_split(const std::vector<int>& labels,
                                 const std::array<double, 3>& fractions, std::uint64_t seed);

/// Rows scaled to unit L1 norm; all-zero rows are left untouched.
Eigen::MatrixXd row_normalize_l1(Eigen::MatrixXd features);

/// Writes `edges.txt` and `features.txt` (native format) into `dir`.
void write_native_dataset(const Graph& g, const std::filesystem::path& dir);

}  // namespace gad
