#include "gad/dataset.hpp"
#include "gad/synthetic.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace gad;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("gad_dataset_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string native_features(int n, int dim, int classes) {
  std::string s = "{\"num_nodes\":" + std::to_string(n) + ",\"dim\":" + std::to_string(dim) +
                  ",\"classes\":" + std::to_string(classes) + "}\n";
  for (int v = 0; v < n; ++v) {
    s += std::to_string(v);
    for (int d = 0; d < dim; ++d) s += " " + std::to_string(v + d);
    s += " " + std::to_string(v % classes) + "\n";
  }
  return s;
}

LoadOptions raw() {
  LoadOptions o;
  o.normalize_features = false;
  return o;
}

}  // namespace

TEST_CASE("duplicate and reversed edge records collapse") {
  TempDir dir;
  const auto e = dir.write("edges.txt", "0 1\n1 0\n0 1\n");
  const auto f = dir.write("features.txt", native_features(2, 1, 2));
  const Dataset ds = load_dataset(e, f, raw());
  CHECK(ds.graph.num_edges() == 1);
  CHECK(ds.graph.degree(0) == 1);
  CHECK(ds.graph.degree(1) == 1);
  CHECK(ds.edge_records == 3);
  CHECK(ds.format == FeatureFormat::kNative);
}

TEST_CASE("comments and blank lines in edge files") {
  TempDir dir;
  const auto e = dir.write("edges.txt", "# header\n\n0 1 # trailing\n  1 2\n");
  const auto f = dir.write("features.txt", native_features(3, 2, 2));
  const Dataset ds = load_dataset(e, f, raw());
  CHECK(ds.graph.num_edges() == 2);
  CHECK(ds.graph.features()(2, 1) == 3.0);
}

TEST_CASE("split fractions 45/18/37 on 100 labeled nodes") {
  std::vector<int> labels(100);
  for (int v = 0; v < 100; ++v) labels[v] = v % 3;
  const auto masks = random_split(labels, {0.45, 0.18, 0.37}, 7);
  CHECK(std::count(masks[0].begin(), masks[0].end(), true) == 45);
  CHECK(std::count(masks[1].begin(), masks[1].end(), true) == 18);
  CHECK(std::count(masks[2].begin(), masks[2].end(), true) == 37);
  for (int v = 0; v < 100; ++v) CHECK(masks[0][v] + masks[1][v] + masks[2][v] == 1);
  CHECK(random_split(labels, {0.45, 0.18, 0.37}, 7) == masks);
  CHECK(random_split(labels, {0.45, 0.18, 0.37}, 8) != masks);
}

TEST_CASE("split skips unlabeled nodes") {
  std::vector<int> labels{0, kUnlabeled, 1, kUnlabeled};
  const auto masks = random_split(labels, {1.0, 0.0, 0.0}, 1);
  CHECK(masks[0] == Mask{true, false, true, false});
}

TEST_CASE("loader errors") {
  TempDir dir;
  const auto f = dir.write("features.txt", native_features(3, 2, 2));
  SUBCASE("unknown node id") {
    const auto e = dir.write("edges.txt", "0 7\n");
    CHECK_THROWS_AS(load_dataset(e, f, raw()), DatasetError);
  }
  SUBCASE("fractions above one") {
    const auto e = dir.write("edges.txt", "0 1\n");
    LoadOptions o = raw();
    o.split.fractions = {0.6, 0.3, 0.2};
    CHECK_THROWS_AS(load_dataset(e, f, o), DatasetError);
  }
  SUBCASE("inconsistent dimension in cora rows") {
    const auto e = dir.write("a.cites", "p1 p2\n");
    const auto c = dir.write("a.content", "p1 0 1 A\np2 1 B\n");
    CHECK_THROWS_AS(load_dataset(e, c, raw()), DatasetError);
  }
  SUBCASE("native row width") {
    const auto e = dir.write("edges.txt", "0 1\n");
    const auto bad = dir.write("bad.txt", "{\"num_nodes\":2,\"dim\":2,\"classes\":2}\n0 1 2 0\n1 1 1\n");
    CHECK_THROWS_AS(load_dataset(e, bad, raw()), DatasetError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset(dir.path / "nope", f, raw()), DatasetError);
  }
}

TEST_CASE("cora layout with string ids") {
  TempDir dir;
  dir.write("tiny.content",
            "31336 0 1 0 Neural_Networks\n"
            "1061127 1 0 0 Rule_Learning\n"
            "1106406 0 0 1 Neural_Networks\n");
  dir.write("tiny.cites", "31336 1061127\n1106406 31336\n1061127 31336\n");
  const DatasetFiles files = locate_dataset(dir.path);
  const Dataset ds = load_dataset(files, raw());
  CHECK(ds.format == FeatureFormat::kCora);
  CHECK(ds.graph.num_nodes() == 3);
  CHECK(ds.graph.num_edges() == 2);
  CHECK(ds.graph.feature_dim() == 3);
  CHECK(ds.graph.num_classes() == 2);
  CHECK(ds.class_names == std::vector<std::string>{"Neural_Networks", "Rule_Learning"});
  CHECK(ds.graph.labels() == std::vector<int>{0, 1, 0});
  CHECK(ds.graph.node_names()[1] == "1061127");
}

TEST_CASE("row normalization to unit L1") {
  Eigen::MatrixXd x(2, 3);
  x << 1, 1, 2, 0, 0, 0;
  const auto n = row_normalize_l1(x);
  CHECK(n.row(0).sum() == doctest::Approx(1.0));
  CHECK(n(0, 2) == doctest::Approx(0.5));
  CHECK(n.row(1).isZero());
}

TEST_CASE("native dataset round trip") {
  TempDir dir;
  SbmSpec spec;
  spec.num_nodes = 60;
  spec.num_blocks = 3;
  spec.p_in = 0.2;
  spec.seed = 4;
  const Graph g = stochastic_block_model(spec);
  write_native_dataset(g, dir.path);
  const Dataset ds = load_dataset(locate_dataset(dir.path), raw());
  CHECK(ds.graph.num_nodes() == g.num_nodes());
  CHECK(ds.graph.edge_list() == g.edge_list());
  CHECK(ds.graph.features() == g.features());
  CHECK(ds.graph.labels() == g.labels());
  CHECK(ds.graph.num_classes() == 3);
}

TEST_CASE("citation-like proxy has the target shape") {
  const Graph g = citation_like_graph({});
  CHECK(g.num_nodes() == 2708);
  CHECK(g.feature_dim() == 1433);
  CHECK(g.num_classes() == 7);
  CHECK(g.num_edges() == std::llround(3.9 * 2708 / 2.0));
  std::int64_t same = 0;
  for (const Edge& e : g.edge_list()) same += g.labels()[e.u] == g.labels()[e.v];
  CHECK(static_cast<double>(same) / g.num_edges() > 0.7);
}
