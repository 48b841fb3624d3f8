#include "gad/dataset.hpp"

#include "gad/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace gad {
namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view tok, const fs::path& file, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": bad number '" +
                       std::string(tok) + "'");
  return v;
}

int parse_int(std::string_view tok, const fs::path& file, std::size_t line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": bad integer '" +
                       std::string(tok) + "'");
  return v;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  return in;
}

struct NodeTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, NodeId> index;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  FeatureFormat format = FeatureFormat::kNative;
};

void add_node(NodeTable& t, std::string_view name, const fs::path& file, std::size_t line_no) {
  const auto id = static_cast<NodeId>(t.names.size());
  if (!t.index.emplace(std::string(name), id).second)
    throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": duplicate node id '" +
                       std::string(name) + "'");
  t.names.emplace_back(name);
}

NodeTable read_native_features(std::istream& in, const std::string& header,
                               const fs::path& file) {
  NodeTable t;
  t.format = FeatureFormat::kNative;
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(file.string() + ": bad JSON header: " + e.what());
  }
  const auto n = h.at("num_nodes").get<std::int64_t>();
  const auto dim = h.at("dim").get<std::int64_t>();
  const int classes = h.value("classes", 0);
  if (n < 0 || dim < 0) throw DatasetError(file.string() + ": negative header sizes");

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<std::int64_t>(toks.size()) != dim + 2)
      throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(dim) + " features, got " +
                         std::to_string(static_cast<std::int64_t>(toks.size()) - 2));
    add_node(t, toks.front(), file, line_no);
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (std::int64_t d = 0; d < dim; ++d) row[d] = parse_double(toks[d + 1], file, line_no);
    t.rows.push_back(std::move(row));
    const int label = parse_int(toks.back(), file, line_no);
    if (label != kUnlabeled && (label < 0 || (classes > 0 && label >= classes)))
      throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": label out of range");
    t.labels.push_back(label);
  }
  if (static_cast<std::int64_t>(t.names.size()) != n)
    throw DatasetError(file.string() + ": header says " + std::to_string(n) + " nodes, found " +
                       std::to_string(t.names.size()));
  for (int c = 0; c < classes; ++c) t.class_names.push_back(std::to_string(c));
  return t;
}

NodeTable read_cora_content(std::istream& in, std::string first_line, const fs::path& file) {
  NodeTable t;
  t.format = FeatureFormat::kCora;
  std::vector<std::string> raw_labels;
  std::optional<std::size_t> dim;
  std::string line = std::move(first_line);
  std::size_t line_no = 0;
  bool have_line = true;
  while (have_line) {
    ++line_no;
    const auto toks = split_ws(line);
    if (!toks.empty()) {
      if (toks.size() < 2)
        throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": short row");
      const std::size_t row_dim = toks.size() - 2;
      if (dim && *dim != row_dim)
        throw DatasetError(file.string() + ":" + std::to_string(line_no) +
                           ": inconsistent feature dimension " + std::to_string(row_dim) +
                           " (expected " + std::to_string(*dim) + ")");
      dim = row_dim;
      add_node(t, toks.front(), file, line_no);
      std::vector<double> row(row_dim);
      for (std::size_t d = 0; d < row_dim; ++d) row[d] = parse_double(toks[d + 1], file, line_no);
      t.rows.push_back(std::move(row));
      raw_labels.emplace_back(toks.back());
    }
    have_line = static_cast<bool>(std::getline(in, line));
  }
  // Class ids follow the lexicographic order of the label strings.
  std::map<std::string, int> classes;
  for (const auto& l : raw_labels) classes.emplace(l, 0);
  int next = 0;
  for (auto& [name, id] : classes) {
    id = next++;
    t.class_names.push_back(name);
  }
  for (const auto& l : raw_labels) t.labels.push_back(classes.at(l));
  return t;
}

}  // namespace

DatasetFiles locate_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DatasetError("not a directory: " + dir.string());
  DatasetFiles files;
  if (fs::exists(dir / "edges.txt") && fs::exists(dir / "features.txt"))
    return {dir / "edges.txt", dir / "features.txt"};
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (ext == ".cites") files.edges = entry.path();
    if (ext == ".content") files.features = entry.path();
  }
  if (files.edges.empty() || files.features.empty())
    throw DatasetError("no dataset in " + dir.string() +
                       " (expected edges.txt+features.txt or *.cites+*.content)");
  return files;
}

Eigen::MatrixXd row_normalize_l1(Eigen::MatrixXd features) {
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    const double s = features.row(r).lpNorm<1>();
    if (s > 0.0) features.row(r) /= s;
  }
  return features;
}

std::array<Mask, 3> random_split(const std::vector<int>& labels,
                                 const std::array<double, 3>& fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw DatasetError("split fractions must be non-negative");
    total += f;
  }
  if (total > 1.0 + 1e-12) throw DatasetError("split fractions sum to more than 1");

  std::vector<NodeId> labeled;
  for (std::size_t v = 0; v < labels.size(); ++v)
    if (labels[v] != kUnlabeled) labeled.push_back(static_cast<NodeId>(v));
  Rng rng = make_rng(seed, "split");
  std::shuffle(labeled.begin(), labeled.end(), rng);

  const auto m = static_cast<std::int64_t>(labeled.size());
  std::array<Mask, 3> masks;
  std::int64_t cursor = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    masks[s].assign(labels.size(), false);
    const std::int64_t want = std::llround(fractions[s] * static_cast<double>(m));
    const std::int64_t take = std::min(want, m - cursor);
    for (std::int64_t i = 0; i < take; ++i) masks[s][labeled[cursor + i]] = true;
    cursor += take;
  }
  return masks;
}

Dataset load_dataset(const fs::path& edge_path, const fs::path& feature_path,
                     const LoadOptions& options) {
  std::ifstream fin = open_input(feature_path);
  std::string first;
  while (std::getline(fin, first))
    if (!split_ws(first).empty()) break;
  const auto lead = first.find_first_not_of(" \t");
  const bool native = lead != std::string::npos && first[lead] == '{';
  NodeTable table = native ? read_native_features(fin, first, feature_path)
                           : read_cora_content(fin, first, feature_path);

  const auto n = static_cast<NodeId>(table.names.size());
  const Eigen::Index dim = table.rows.empty() ? 0 : static_cast<Eigen::Index>(table.rows[0].size());
  Eigen::MatrixXd features(n, dim);
  for (NodeId v = 0; v < n; ++v)
    for (Eigen::Index d = 0; d < dim; ++d) features(v, d) = table.rows[v][d];
  table.rows.clear();
  if (options.normalize_features) features = row_normalize_l1(std::move(features));

  std::ifstream ein = open_input(edge_path);
  std::vector<Edge> edges;
  std::size_t records = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ein, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto toks = split_ws(view);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw DatasetError(edge_path.string() + ":" + std::to_string(line_no) +
                         ": expected 'u v'");
    NodeId ends[2];
    for (int k = 0; k < 2; ++k) {
      const auto it = table.index.find(std::string(toks[k]));
      if (it == table.index.end())
        throw DatasetError(edge_path.string() + ":" + std::to_string(line_no) +
                           ": unknown node id '" + std::string(toks[k]) + "'");
      ends[k] = it->second;
    }
    edges.push_back({ends[0], ends[1]});
    ++records;
  }

  std::array<Mask, 3> masks = options.split.masks
                                  ? *options.split.masks
                                  : random_split(table.labels, options.split.fractions, options.seed);

  NodeData data;
  data.features = std::move(features);
  data.labels = std::move(table.labels);
  data.num_classes = static_cast<int>(table.class_names.size());
  data.train = std::move(masks[0]);
  data.val = std::move(masks[1]);
  data.test = std::move(masks[2]);
  data.names = std::move(table.names);

  Dataset ds;
  try {
    ds.graph = Graph(n, edges, std::move(data));
  } catch (const std::exception& e) {
    throw DatasetError(e.what());
  }
  ds.format = table.format;
  ds.edge_records = records;
  ds.class_names = std::move(table.class_names);
  return ds;
}

void write_native_dataset(const Graph& g, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream ef(dir / "edges.txt");
  ef << "# undirected edge list, one pair per line\n";
  for (const Edge& e : g.edge_list())
    ef << g.node_names()[e.u] << ' ' << g.node_names()[e.v] << '\n';

  std::ofstream ff(dir / "features.txt");
  nlohmann::json header = {
      {"num_nodes", g.num_nodes()}, {"dim", g.feature_dim()}, {"classes", g.num_classes()}};
  ff << header.dump() << '\n';
  char buf[32];
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    ff << g.node_names()[v];
    for (Eigen::Index d = 0; d < g.feature_dim(); ++d) {
      const auto res = std::to_chars(buf, buf + sizeof buf, g.features()(v, d));
      ff << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    ff << ' ' << g.labels()[v] << '\n';
  }
  if (!ef || !ff) throw DatasetError("failed writing dataset to " + dir.string());
}

}  // namespace gad
