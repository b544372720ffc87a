// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mnnas/heads.hpp"
#include "mnnas/io.hpp"
#include "mnnas/model.hpp"

namespace mnnas {

enum class Task { kClassification, kCommunity, kInversePartition };

Task parse_task(const std::string& s);
std::string to_string(Task t);

struct OptimConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient norm ceiling
};

struct TrainConfig {
  Task task = Task::kClassification;
  ModelConfig model;
  OptimConfig optim;
  int64_t epochs = 100;
  int64_t batch_size = 1;  // graphs per optimizer step
  double lambda_bal = 1.0;
  double lambda_ent = 0.1;
  // Extra per-node uniform(-scale, scale) feature dims appended to the
  // dataset features; breaks ties on regular graphs where every degree
  // one-hot row is identical and cluster assignments would otherwise
  // collapse. Small scales keep the initial head logits near zero, which
  // matters for clustering tasks whose loss has a saddle at consensus.
  int64_t feature_aug_dim = 0;
  double feature_aug_scale = 1.0;
  uint64_t seed = 0;
  int64_t eval_every = 10;

  void validate() const;
};

// Adam with decoupled-from-nothing classic weight decay (added to the raw
// gradient) and global-norm clipping. Never mutates stored gradients; the
// effective gradient is recomputed inside step so zero_grad + step is the
// whole protocol.
class Adam {
 public:
  Adam(std::vector<Tensor> params, const OptimConfig& cfg);

  void zero_grad();
  // One update; returns the pre-clip global gradient norm.
  double step();

 private:
  std::vector<Tensor> params_;
  OptimConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// Raised when the loss or gradients leave the reals; carries epoch, learning
// rate, and gradient norms in the message. The CLI maps it to exit code 3.
struct NanAbortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreparedGraph {
  Graph graph;
  GraphInputs inputs;
};

// Attaches augmentation features (substream "aug/<index>" of `seed`) and
// precomputes model inputs. Errors if feature dims don't add up to
// `expected_d_i`.
std::vector<PreparedGraph> prepare_dataset(const std::vector<Graph>& graphs,
                                           int64_t aug_dim, uint64_t seed,
                                           int64_t expected_d_i, double aug_scale = 1.0);

struct EvalSet {
  std::string dataset;
  std::string split;
  std::vector<Graph> graphs;
};

struct RunReport {
  std::string run_id;
  std::string task;
  std::string mode;
  uint64_t seed = 0;
  int64_t epochs = 0;
  std::vector<double> epoch_losses;  // mean per-graph loss, one per epoch
  std::vector<MetricsRow> metrics;   // eval rows at every eval_every epoch
  double wall_clock_seconds = 0.0;
  double final_mean_cosine = 0.0;  // mean pairwise cosine on the train set
  std::string checkpoint_path;
};

std::string run_report_to_json(const RunReport& report);

struct TrainOutcome {
  Model model;
  RunReport report;
};

TrainOutcome train(const TrainConfig& cfg, const std::vector<Graph>& train_graphs,
                   const std::vector<EvalSet>& eval_sets);

TaskMetrics evaluate_model(Model& model, Task task, const std::vector<PreparedGraph>& data,
                           double lambda_bal = 1.0, double lambda_ent = 0.1);

// Mean over layers/dimensions/nodes of the op-probability rows, grouped by
// degree quintile: 5 rows of K columns, each row on the simplex.
std::vector<std::vector<double>> explain_preferences(Model& model,
                                                     const std::vector<PreparedGraph>& data);

// Mean pairwise cosine similarity among mapped embeddings over a dataset
// (the quantity the diversity regularizer pushes down); 0 when K == 1.
double mean_pairwise_cosine(Model& model, const std::vector<PreparedGraph>& data);

}  // namespace mnnas
