// SPDX-License-Identifier: Apache-2.0
#include "mnnas/io.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mnnas/rng.hpp"
#include "mnnas/synth.hpp"

using namespace mnnas;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "mnnas_io_test";
  fs::create_directories(dir);
  return dir;
}

bool graphs_equal(const Graph& a, const Graph& b) {
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) return false;
  for (int64_t i = 0; i < a.num_edges(); ++i)
    if (!(a.edges()[static_cast<size_t>(i)] == b.edges()[static_cast<size_t>(i)]))
      return false;
  if (a.feature_dim() != b.feature_dim()) return false;
  const auto fa = a.features(), fb = b.features();
  for (size_t i = 0; i < fa.size(); ++i)
    if (fa[i] != fb[i]) return false;
  if (a.label() != b.label()) return false;
  if (a.node_labels() != b.node_labels()) return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("graph json round-trip preserves everything") {
  Graph g(3, {{0, 1}, {1, 2}}, {1.0, 0.5, -2.0, 0.25, 3.5, 0.125}, 2, 1,
          std::vector<int>{0, 0, 1});
  Graph back = graph_from_json(graph_to_json(g));
  CHECK(graphs_equal(g, back));

  // Null label / node_labels survive too.
  Graph plain = Graph::structure_only(2, {{0, 1}});
  CHECK(graphs_equal(plain, graph_from_json(graph_to_json(plain))));
}

TEST_CASE("graph json keeps exact doubles") {
  Graph g(1, {}, {0.1 + 0.2, 1.0 / 3.0}, 2);
  Graph back = graph_from_json(graph_to_json(g));
  CHECK(back.features()[0] == 0.1 + 0.2);
  CHECK(back.features()[1] == 1.0 / 3.0);
}

TEST_CASE("dataset save/load round-trip and determinism") {
  auto dir = temp_dir();
  auto graphs = generate_spurious_motif(0.8, 10, 42, false);
  const auto path = dir / "ds.jsonl";
  save_dataset(path, graphs);
  auto loaded = load_dataset(path);
  REQUIRE(loaded.size() == graphs.size());
  for (size_t i = 0; i < graphs.size(); ++i) CHECK(graphs_equal(graphs[i], loaded[i]));

  // Byte-for-byte determinism of serialization.
  const auto path2 = dir / "ds2.jsonl";
  save_dataset(path2, generate_spurious_motif(0.8, 10, 42, false));
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("empty and malformed dataset files") {
  auto dir = temp_dir();
  const auto empty = dir / "empty.jsonl";
  std::ofstream(empty).close();
  CHECK(load_dataset(empty).empty());

  const auto bad = dir / "bad.jsonl";
  {
    std::ofstream out(bad);
    out << graph_to_json(Graph::structure_only(2, {{0, 1}})) << '\n';
    out << "{\"num_nodes\": 2, \"edges\": [[0,\n";
  }
  CHECK_THROWS_WITH_AS(load_dataset(bad), doctest::Contains(":2"), std::runtime_error);
  CHECK_THROWS_AS(load_dataset(dir / "missing.jsonl"), std::runtime_error);
}

TEST_CASE("generator spec json round-trip rejects unknown keys") {
  GeneratorSpec spec;
  spec.family = "sbm";
  spec.block_sizes = {50, 50, 50};
  spec.p_in = 0.3;
  spec.p_out = 0.02;
  spec.seed = 7;
  spec.train_count = 1;
  GeneratorSpec back = generator_spec_from_json(generator_spec_to_json(spec));
  CHECK(back.family == "sbm");
  CHECK(back.block_sizes == std::vector<int64_t>{50, 50, 50});
  CHECK(back.p_in == 0.3);
  CHECK(back.seed == 7);

  CHECK_THROWS_WITH_AS(generator_spec_from_json("{\"family\":\"ba\",\"nodes\":10}"),
                       doctest::Contains("unknown key: nodes"), std::invalid_argument);
}

TEST_CASE("dataset directory layout") {
  auto dir = temp_dir() / "bundle";
  GeneratorSpec spec;
  spec.family = "er";
  spec.n = 12;
  spec.p = 0.3;
  spec.train_count = 2;
  spec.test_count = 1;
  spec.seed = 3;
  save_dataset_dir(dir, spec, generate_dataset(spec));
  CHECK(fs::exists(dir / "train.jsonl"));
  CHECK(fs::exists(dir / "test.jsonl"));
  CHECK(fs::exists(dir / "spec.json"));
  CHECK(load_dataset(dir / "train.jsonl").size() == 2);
  CHECK(load_dataset(dir / "test.jsonl").size() == 1);
  auto echoed = generator_spec_from_json(slurp(dir / "spec.json"));
  CHECK(echoed.family == "er");
  CHECK(echoed.n == 12);
}

TEST_CASE("checkpoint round-trip restores parameters bit-exactly") {
  ModelConfig cfg;
  cfg.d_i = 3;
  cfg.d_e = 4;
  cfg.d_m = 4;
  cfg.d_o = 2;
  cfg.layers = 2;
  Model m(cfg);
  Rng rng(13);
  m.init(rng);

  auto dir = temp_dir();
  const auto path = dir / "model.ckpt.json";
  save_checkpoint(path, snapshot_model(m, "classification", 0, 1.0, 99));
  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.task == "classification");
  CHECK(loaded.seed == 99);
  CHECK(loaded.model.d_e == 4);
  CHECK(loaded.model.mode == SearchMode::kMnnas);

  Model restored = restore_model(loaded);
  auto a = m.named_parameters();
  auto b = restored.named_parameters();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    const auto va = a[i].second.values(), vb = b[i].second.values();
    REQUIRE(va.size() == vb.size());
    for (size_t k = 0; k < va.size(); ++k) CHECK(va[k] == vb[k]);
  }
}

TEST_CASE("checkpoint restores single-dim score tables") {
  ModelConfig cfg;
  cfg.d_i = 3;
  cfg.d_e = 4;
  cfg.d_m = 4;
  cfg.d_o = 2;
  cfg.layers = 2;
  cfg.mode = SearchMode::kNodeNasSingleDim;
  Model m(cfg);
  Rng rng(5);
  m.init(rng);
  Graph g = attach_degree_features(Graph::structure_only(6, {{0, 1}, {1, 2}, {2, 3},
                                                             {3, 4}, {4, 5}, {0, 5}}));
  ModelConfig with_dim = cfg;
  with_dim.d_i = kDegreeFeatureDim;
  Model m2(with_dim);
  Rng rng2(5);
  m2.init(rng2);
  m2.forward(GraphInputs(g));  // materializes score tables
  // Nudge the tables so restoration is observable.
  for (auto& [name, t] : m2.named_parameters())
    if (name.find("node_scores") != std::string::npos)
      for (auto& x : t.mutable_values()) x = 0.25;
  auto out = m2.forward(GraphInputs(g));

  auto dir = temp_dir();
  const auto path = dir / "sd.ckpt.json";
  save_checkpoint(path, snapshot_model(m2, "community", 0, 1.0, 1));
  Model restored = restore_model(load_checkpoint(path));
  auto rout = restored.forward(GraphInputs(g));
  for (int64_t i = 0; i < 6; ++i)
    for (int64_t c = 0; c < 4; ++c)
      CHECK(rout.node_repr.at(i, c) == out.node_repr.at(i, c));

  bool found = false;
  for (auto& [name, t] : restored.named_parameters())
    if (name.find("node_scores") != std::string::npos) {
      found = true;
      for (double x : t.values()) CHECK(x == 0.25);
    }
  CHECK(found);
}

TEST_CASE("checkpoint mismatch diagnostics") {
  ModelConfig cfg;
  cfg.d_i = 3;
  cfg.d_e = 4;
  cfg.d_m = 4;
  cfg.d_o = 2;
  cfg.layers = 1;
  Model m(cfg);
  Rng rng(1);
  m.init(rng);
  Checkpoint ckpt = snapshot_model(m, "t", 0, 1.0, 0);
  ckpt.params.pop_back();
  CHECK_THROWS_WITH_AS(restore_model(ckpt), doctest::Contains("tensors"),
                       std::runtime_error);
}

TEST_CASE("metrics csv format is stable and exact") {
  auto dir = temp_dir();
  const auto path = dir / "metrics.csv";
  std::vector<MetricsRow> rows{
      {"run1", "community", "sbm", "test", "modularity", 0.1 + 0.2, 7, 200},
      {"run1", "community", "sbm", "test", "loss", -1.0 / 3.0, 7, 200},
  };
  write_metrics_csv(path, rows);
  const std::string text = slurp(path);
  CHECK(text ==
        "run_id,task,dataset,split,metric,value,seed,epoch\n"
        "run1,community,sbm,test,modularity,0.30000000000000004,7,200\n"
        "run1,community,sbm,test,loss,-0.33333333333333331,7,200\n");
}

TEST_CASE("format_double survives a parse round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, 99900.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
