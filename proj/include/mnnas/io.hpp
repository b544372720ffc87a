// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mnnas/graph.hpp"
#include "mnnas/model.hpp"
#include "mnnas/synth.hpp"

namespace mnnas {

// Graph wire format:
//   {"num_nodes": N, "edges": [[u,v],...], "features": [[...],...],
//    "label": int|null, "node_labels": [...]|null}
// Edges are stored canonically with u < v.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

// JSON-lines datasets: one graph per line. Loading reports parse failures
// with the 1-based line number; an empty file is an empty dataset.
void save_dataset(const std::filesystem::path& path, const std::vector<Graph>& graphs);
std::vector<Graph> load_dataset(const std::filesystem::path& path);

std::string generator_spec_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const std::string& text);

std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& text);

// Dataset directory layout: <dir>/train.jsonl, <dir>/test.jsonl,
// <dir>/spec.json.
void save_dataset_dir(const std::filesystem::path& dir, const GeneratorSpec& spec,
                      const DatasetBundle& bundle);

// Everything needed to rebuild a trained model and rerun evaluation.
struct Checkpoint {
  std::string task;
  ModelConfig model;
  int64_t feature_aug_dim = 0;
  double feature_aug_scale = 1.0;
  uint64_t seed = 0;
  // (name, shape, flat values) in the model's stable parameter order.
  struct Entry {
    std::string name;
    std::vector<int64_t> shape;
    std::vector<double> values;
  };
  std::vector<Entry> params;
};

Checkpoint snapshot_model(Model& model, const std::string& task, int64_t feature_aug_dim,
                          double feature_aug_scale, uint64_t seed);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Builds a model from the checkpoint and copies every stored tensor into it,
// recreating single-dim score tables as needed. Throws on any name or shape
// mismatch.
Model restore_model(const Checkpoint& ckpt);

struct MetricsRow {
  std::string run_id;
  std::string task;
  std::string dataset;
  std::string split;
  std::string metric;
  double value = 0.0;
  uint64_t seed = 0;
  int64_t epoch = 0;
};

// CSV with a fixed header; doubles are written with "%.17g" so equal runs
// produce byte-identical files.
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows);

std::string format_double(double v);  // "%.17g"

}  // namespace mnnas
