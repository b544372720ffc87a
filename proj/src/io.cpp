// SPDX-License-Identifier: Apache-2.0
#include "mnnas/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mnnas {

using nlohmann::json;

namespace {

json graph_to_json_obj(const Graph& g) {
  json j;
  j["num_nodes"] = g.num_nodes();
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  json features = json::array();
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const auto row = g.feature_row(i);
    features.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  j["features"] = std::move(features);
  j["label"] = g.label() ? json(*g.label()) : json(nullptr);
  j["node_labels"] = g.node_labels() ? json(*g.node_labels()) : json(nullptr);
  return j;
}

Graph graph_from_json_obj(const json& j) {
  const int64_t n = j.at("num_nodes").get<int64_t>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("graph json: each edge must be a [u, v] pair");
    edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
  }
  std::vector<double> features;
  int64_t feature_dim = 0;
  const auto& rows = j.at("features");
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (i == 0) feature_dim = static_cast<int64_t>(row.size());
    if (static_cast<int64_t>(row.size()) != feature_dim)
      throw std::invalid_argument("graph json: ragged feature rows");
    features.insert(features.end(), row.begin(), row.end());
  }
  std::optional<int> label;
  if (j.contains("label") && !j.at("label").is_null()) label = j.at("label").get<int>();
  std::optional<std::vector<int>> node_labels;
  if (j.contains("node_labels") && !j.at("node_labels").is_null())
    node_labels = j.at("node_labels").get<std::vector<int>>();
  return Graph(n, std::move(edges), std::move(features), feature_dim, label,
               std::move(node_labels));
}

}  // namespace

std::string graph_to_json(const Graph& g) { return graph_to_json_obj(g).dump(); }

Graph graph_from_json(const std::string& text) {
  return graph_from_json_obj(json::parse(text));
}

void save_dataset(const std::filesystem::path& path, const std::vector<Graph>& graphs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const auto& g : graphs) out << graph_to_json(g) << '\n';
}

std::vector<Graph> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
  std::vector<Graph> graphs;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      graphs.push_back(graph_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return graphs;
}

std::string generator_spec_to_json(const GeneratorSpec& spec) {
  json j;
  j["family"] = spec.family;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["p"] = spec.p;
  j["d"] = spec.d;
  j["k"] = spec.k;
  j["block_sizes"] = spec.block_sizes;
  j["p_in"] = spec.p_in;
  j["p_out"] = spec.p_out;
  j["bias"] = spec.bias;
  j["train_count"] = spec.train_count;
  j["test_count"] = spec.test_count;
  j["seed"] = spec.seed;
  return j.dump(2);
}

GeneratorSpec generator_spec_from_json(const std::string& text) {
  const json j = json::parse(text);
  static const std::set<std::string> known{
      "family", "n",     "m",    "p",     "d",           "k",         "block_sizes",
      "p_in",   "p_out", "bias", "train_count", "test_count", "seed"};
  for (const auto& [key, val] : j.items())
    if (!known.count(key))
      throw std::invalid_argument("generator spec: unknown key: " + key);
  GeneratorSpec spec;
  spec.family = j.at("family").get<std::string>();
  spec.n = j.value("n", spec.n);
  spec.m = j.value("m", spec.m);
  spec.p = j.value("p", spec.p);
  spec.d = j.value("d", spec.d);
  spec.k = j.value("k", spec.k);
  spec.block_sizes = j.value("block_sizes", spec.block_sizes);
  spec.p_in = j.value("p_in", spec.p_in);
  spec.p_out = j.value("p_out", spec.p_out);
  spec.bias = j.value("bias", spec.bias);
  spec.train_count = j.value("train_count", spec.train_count);
  spec.test_count = j.value("test_count", spec.test_count);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

void save_dataset_dir(const std::filesystem::path& dir, const GeneratorSpec& spec,
                      const DatasetBundle& bundle) {
  std::filesystem::create_directories(dir);
  save_dataset(dir / "train.jsonl", bundle.train);
  save_dataset(dir / "test.jsonl", bundle.test);
  std::ofstream out(dir / "spec.json");
  if (!out) throw std::runtime_error("cannot write spec.json in " + dir.string());
  out << generator_spec_to_json(spec) << '\n';
}

namespace {

json model_config_to_json_obj(const ModelConfig& cfg) {
  json j;
  j["d_i"] = cfg.d_i;
  j["d_e"] = cfg.d_e;
  j["d_m"] = cfg.d_m;
  j["d_o"] = cfg.d_o;
  j["layers"] = cfg.layers;
  j["op_names"] = cfg.op_names;
  j["eta_init"] = cfg.eta_init;
  j["beta"] = cfg.beta;
  j["mode"] = to_string(cfg.mode);
  return j;
}

ModelConfig model_config_from_json_obj(const json& j) {
  static const std::set<std::string> known{"d_i",      "d_e",  "d_m",  "d_o", "layers",
                                           "op_names", "eta_init", "beta", "mode"};
  for (const auto& [key, val] : j.items())
    if (!known.count(key)) throw std::invalid_argument("model config: unknown key: " + key);
  ModelConfig cfg;
  cfg.d_i = j.value("d_i", cfg.d_i);
  cfg.d_e = j.value("d_e", cfg.d_e);
  cfg.d_m = j.value("d_m", cfg.d_m);
  cfg.d_o = j.value("d_o", cfg.d_o);
  cfg.layers = j.value("layers", cfg.layers);
  cfg.op_names = j.value("op_names", cfg.op_names);
  cfg.eta_init = j.value("eta_init", cfg.eta_init);
  cfg.beta = j.value("beta", cfg.beta);
  if (j.contains("mode")) cfg.mode = parse_search_mode(j.at("mode").get<std::string>());
  cfg.validate();
  return cfg;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& cfg) {
  return model_config_to_json_obj(cfg).dump(2);
}

ModelConfig model_config_from_json(const std::string& text) {
  return model_config_from_json_obj(json::parse(text));
}

Checkpoint snapshot_model(Model& model, const std::string& task, int64_t feature_aug_dim,
                          double feature_aug_scale, uint64_t seed) {
  Checkpoint ckpt;
  ckpt.task = task;
  ckpt.model = model.config();
  ckpt.feature_aug_dim = feature_aug_dim;
  ckpt.feature_aug_scale = feature_aug_scale;
  ckpt.seed = seed;
  for (auto& [name, t] : model.named_parameters()) {
    Checkpoint::Entry e;
    e.name = name;
    e.shape = std::vector<int64_t>(t.shape().begin(), t.shape().end());
    const auto v = t.values();
    e.values = std::vector<double>(v.begin(), v.end());
    ckpt.params.push_back(std::move(e));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json j;
  j["format"] = 1;
  j["task"] = ckpt.task;
  j["model"] = model_config_to_json_obj(ckpt.model);
  j["feature_aug_dim"] = ckpt.feature_aug_dim;
  j["feature_aug_scale"] = ckpt.feature_aug_scale;
  j["seed"] = ckpt.seed;
  json params = json::array();
  for (const auto& e : ckpt.params)
    params.push_back({{"name", e.name}, {"shape", e.shape}, {"values", e.values}});
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("checkpoint parse error in " + path.string() + ": " +
                             e.what());
  }
  if (j.value("format", 0) != 1)
    throw std::runtime_error("checkpoint format not recognized: " + path.string());
  Checkpoint ckpt;
  ckpt.task = j.at("task").get<std::string>();
  ckpt.model = model_config_from_json_obj(j.at("model"));
  ckpt.feature_aug_dim = j.value("feature_aug_dim", int64_t{0});
  ckpt.feature_aug_scale = j.value("feature_aug_scale", 1.0);
  ckpt.seed = j.value("seed", uint64_t{0});
  for (const auto& p : j.at("params")) {
    Checkpoint::Entry e;
    e.name = p.at("name").get<std::string>();
    e.shape = p.at("shape").get<std::vector<int64_t>>();
    e.values = p.at("values").get<std::vector<double>>();
    int64_t numel = 1;
    for (int64_t s : e.shape) numel *= s;
    if (numel != static_cast<int64_t>(e.values.size()))
      throw std::runtime_error("checkpoint entry " + e.name +
                               ": value count does not match shape");
    ckpt.params.push_back(std::move(e));
  }
  return ckpt;
}

Model restore_model(const Checkpoint& ckpt) {
  Model model(ckpt.model);
  // Recreate lazily-sized single-dim score tables before name matching.
  for (const auto& e : ckpt.params) {
    const auto pos = e.name.find("/node_scores");
    if (pos == std::string::npos) continue;
    const int64_t layer = std::stoll(e.name.substr(5, pos - 5));  // "layer<L>/..."
    if (e.shape.size() != 2)
      throw std::runtime_error("checkpoint entry " + e.name + ": expected a matrix");
    model.restore_node_scores(layer,
                              Tensor::zeros({e.shape[0], e.shape[1]}, /*requires_grad=*/true));
  }
  auto named = model.named_parameters();
  if (named.size() != ckpt.params.size())
    throw std::runtime_error("checkpoint holds " + std::to_string(ckpt.params.size()) +
                             " tensors but the model has " + std::to_string(named.size()));
  for (size_t i = 0; i < named.size(); ++i) {
    auto& [name, t] = named[i];
    const auto& e = ckpt.params[i];
    if (name != e.name)
      throw std::runtime_error("checkpoint entry " + e.name +
                               " does not match model parameter " + name);
    if (t.numel() != static_cast<int64_t>(e.values.size()))
      throw std::runtime_error("checkpoint entry " + e.name + ": shape mismatch");
    std::copy(e.values.begin(), e.values.end(), t.mutable_values().begin());
  }
  return model;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics: " + path.string());
  out << "run_id,task,dataset,split,metric,value,seed,epoch\n";
  for (const auto& r : rows)
    out << r.run_id << ',' << r.task << ',' << r.dataset << ',' << r.split << ','
        << r.metric << ',' << format_double(r.value) << ',' << r.seed << ',' << r.epoch
        << '\n';
}

}  // namespace mnnas
