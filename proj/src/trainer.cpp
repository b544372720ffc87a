// SPDX-License-Identifier: Apache-2.0
#include "mnnas/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mnnas/graph_stats.hpp"
#include "mnnas/rng.hpp"

namespace mnnas {

namespace {

using nlohmann::json;

// Per-graph loss shared verbatim between training and evaluation, so an eval
// on the train split reproduces the in-training numbers exactly.
Tensor task_loss(Model& model, const ForwardResult& out, const PreparedGraph& pg, Task task,
                 double lambda_bal, double lambda_ent) {
  switch (task) {
    case Task::kClassification: {
      if (!pg.graph.label())
        throw std::invalid_argument("classification requires a graph label");
      return cross_entropy(classify_logits(out.node_repr, model.head_weights()),
                           *pg.graph.label());
    }
    case Task::kCommunity:
      return soft_modularity_loss(pg.graph,
                                  soft_assignment(out.node_repr, model.head_weights()));
    case Task::kInversePartition:
      return inverse_partition_loss(pg.graph,
                                    soft_assignment(out.node_repr, model.head_weights()),
                                    lambda_bal, lambda_ent);
  }
  throw std::logic_error("task_loss: unhandled task");
}

struct GradNormSummary {
  double global = 0.0;
  std::string worst_name;
  double worst = 0.0;
};

GradNormSummary grad_norms(std::vector<std::pair<std::string, Tensor>> named) {
  GradNormSummary s;
  double sumsq = 0.0;
  for (auto& [name, p] : named) {
    double psq = 0.0;
    for (double g : p.grad()) psq += g * g;
    sumsq += psq;
    const double pn = std::sqrt(psq);
    if (pn >= s.worst || !std::isfinite(pn)) {
      s.worst = pn;
      s.worst_name = name;
      if (!std::isfinite(pn)) break;
    }
  }
  s.global = std::sqrt(sumsq);
  return s;
}

}  // namespace

Task parse_task(const std::string& s) {
  if (s == "classification") return Task::kClassification;
  if (s == "community") return Task::kCommunity;
  if (s == "inverse_partition") return Task::kInversePartition;
  throw std::invalid_argument("unknown task: " + s);
}

std::string to_string(Task t) {
  switch (t) {
    case Task::kClassification: return "classification";
    case Task::kCommunity: return "community";
    case Task::kInversePartition: return "inverse_partition";
  }
  return "?";
}

void TrainConfig::validate() const {
  model.validate();
  if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("train config: eval_every must be >= 1");
  if (feature_aug_dim < 0)
    throw std::invalid_argument("train config: feature_aug_dim must be >= 0");
  if (!(feature_aug_scale > 0))
    throw std::invalid_argument("train config: feature_aug_scale must be > 0");
  if (!(optim.learning_rate > 0))
    throw std::invalid_argument("train config: learning_rate must be > 0");
  if (optim.weight_decay < 0)
    throw std::invalid_argument("train config: weight_decay must be >= 0");
  if (!(optim.beta1 >= 0 && optim.beta1 < 1) || !(optim.beta2 >= 0 && optim.beta2 < 1))
    throw std::invalid_argument("train config: adam betas must lie in [0, 1)");
  if (!(optim.eps > 0)) throw std::invalid_argument("train config: eps must be > 0");
  if (!(optim.clip_norm > 0)) throw std::invalid_argument("train config: clip_norm must be > 0");
  if (lambda_bal < 0 || lambda_ent < 0)
    throw std::invalid_argument("train config: lambda_bal/lambda_ent must be >= 0");
}

Adam::Adam(std::vector<Tensor> params, const OptimConfig& cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
    v_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double Adam::step() {
  ++t_;
  // Effective gradient g + wd*p; two passes so stored grads stay untouched.
  double sumsq = 0.0;
  for (size_t i = 0; i < params_.size(); ++i) {
    auto vals = params_[i].values();
    auto grads = params_[i].grad();
    for (size_t j = 0; j < vals.size(); ++j) {
      const double g = grads[j] + cfg_.weight_decay * vals[j];
      sumsq += g * g;
    }
  }
  const double norm = std::sqrt(sumsq);
  const double scale = norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;

  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    auto vals = params_[i].mutable_values();
    auto grads = params_[i].grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (size_t j = 0; j < vals.size(); ++j) {
      const double g = (grads[j] + cfg_.weight_decay * vals[j]) * scale;
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
      vals[j] -= cfg_.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg_.eps);
    }
  }
  return norm;
}

std::vector<PreparedGraph> prepare_dataset(const std::vector<Graph>& graphs, int64_t aug_dim,
                                           uint64_t seed, int64_t expected_d_i,
                                           double aug_scale) {
  std::vector<PreparedGraph> out;
  out.reserve(graphs.size());
  for (size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi];
    const int64_t total = g.feature_dim() + aug_dim;
    if (total != expected_d_i)
      throw std::invalid_argument(
          "dataset features have dim " + std::to_string(g.feature_dim()) + " + " +
          std::to_string(aug_dim) + " augmented = " + std::to_string(total) +
          ", model expects d_i = " + std::to_string(expected_d_i));
    if (aug_dim == 0) {
      out.push_back({g, GraphInputs(g)});
      continue;
    }
    Rng rng = substream(seed, "aug/" + std::to_string(gi));
    const int64_t n = g.num_nodes();
    std::vector<double> values(static_cast<size_t>(n * total));
    for (int64_t i = 0; i < n; ++i) {
      auto row = g.feature_row(static_cast<NodeId>(i));
      double* dst = values.data() + i * total;
      std::copy(row.begin(), row.end(), dst);
      for (int64_t a = 0; a < aug_dim; ++a)
        dst[g.feature_dim() + a] = rng.uniform(-aug_scale, aug_scale);
    }
    Tensor feats = Tensor::from_values({n, total}, std::move(values));
    out.push_back({g, GraphInputs(g, std::move(feats))});
  }
  return out;
}

TaskMetrics evaluate_model(Model& model, Task task, const std::vector<PreparedGraph>& data,
                           double lambda_bal, double lambda_ent) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  TaskMetrics tm;
  tm.task = to_string(task);
  double loss_sum = 0.0;
  double metric_sum = 0.0;
  for (const auto& pg : data) {
    ForwardResult out = model.forward(pg.inputs);
    loss_sum += task_loss(model, out, pg, task, lambda_bal, lambda_ent).item();
    switch (task) {
      case Task::kClassification: {
        Tensor logits = classify_logits(out.node_repr, model.head_weights());
        metric_sum += argmax_class(logits) == *pg.graph.label() ? 1.0 : 0.0;
        break;
      }
      case Task::kCommunity: {
        Tensor s = soft_assignment(out.node_repr, model.head_weights());
        metric_sum += hard_modularity(pg.graph, argmax_rows(s));
        break;
      }
      case Task::kInversePartition: {
        Tensor s = soft_assignment(out.node_repr, model.head_weights());
        metric_sum += inter_edge_ratio(pg.graph, argmax_rows(s));
        break;
      }
    }
  }
  const double n = static_cast<double>(data.size());
  tm.loss = loss_sum / n;
  switch (task) {
    case Task::kClassification: tm.metrics["accuracy"] = metric_sum / n; break;
    case Task::kCommunity: tm.metrics["modularity"] = metric_sum / n; break;
    case Task::kInversePartition: tm.metrics["inter_edge_ratio"] = metric_sum / n; break;
  }
  return tm;
}

std::vector<std::vector<double>> explain_preferences(Model& model,
                                                     const std::vector<PreparedGraph>& data) {
  if (data.empty()) throw std::invalid_argument("explain: empty dataset");
  const int64_t K = model.config().K();
  std::vector<std::vector<double>> sums(5, std::vector<double>(static_cast<size_t>(K), 0.0));
  std::vector<int64_t> counts(5, 0);
  for (const auto& pg : data) {
    const std::vector<int> groups = degree_quintile_groups(pg.graph);
    ForwardResult out = model.forward(pg.inputs);
    for (const auto& dims : out.probs) {
      for (const auto& p : dims) {
        for (int64_t i = 0; i < p.rows(); ++i) {
          const int q = groups[static_cast<size_t>(i)];
          for (int64_t k = 0; k < K; ++k)
            sums[static_cast<size_t>(q)][static_cast<size_t>(k)] += p.at(i, k);
          ++counts[static_cast<size_t>(q)];
        }
      }
    }
  }
  for (int q = 0; q < 5; ++q) {
    if (counts[static_cast<size_t>(q)] == 0) continue;
    for (auto& v : sums[static_cast<size_t>(q)]) v /= static_cast<double>(counts[static_cast<size_t>(q)]);
  }
  return sums;
}

double mean_pairwise_cosine(Model& model, const std::vector<PreparedGraph>& data) {
  const int64_t K = model.config().K();
  if (K < 2) return 0.0;
  if (data.empty()) throw std::invalid_argument("mean_pairwise_cosine: empty dataset");
  double total = 0.0;
  double pairs = 0.0;
  for (const auto& pg : data) {
    ForwardResult out = model.forward(pg.inputs);
    total += out.l_cos.item();
    pairs += static_cast<double>(model.config().layers * pg.graph.num_nodes() * K * (K - 1));
  }
  return total / pairs;
}

TrainOutcome train(const TrainConfig& cfg, const std::vector<Graph>& train_graphs,
                   const std::vector<EvalSet>& eval_sets) {
  cfg.validate();
  if (train_graphs.empty()) throw std::invalid_argument("trainer: empty training set");

  const auto t0 = std::chrono::steady_clock::now();

  auto train_data = prepare_dataset(train_graphs, cfg.feature_aug_dim, cfg.seed, cfg.model.d_i,
                                    cfg.feature_aug_scale);
  std::vector<std::pair<const EvalSet*, std::vector<PreparedGraph>>> eval_data;
  eval_data.reserve(eval_sets.size());
  for (const auto& es : eval_sets)
    eval_data.emplace_back(&es, prepare_dataset(es.graphs, cfg.feature_aug_dim, cfg.seed,
                                                cfg.model.d_i, cfg.feature_aug_scale));

  Model model(cfg.model);
  {
    Rng init_rng = substream(cfg.seed, "init");
    model.init(init_rng);
  }
  // Single-dim score tables are created on first forward; materialize them
  // before the optimizer snapshots the parameter list.
  if (cfg.model.mode == SearchMode::kNodeNasSingleDim) (void)model.forward(train_data[0].inputs);

  Adam opt(model.parameters(), cfg.optim);
  Rng shuffle_rng = substream(cfg.seed, "shuffle");

  RunReport report;
  report.task = to_string(cfg.task);
  report.mode = to_string(cfg.model.mode);
  report.seed = cfg.seed;
  report.epochs = cfg.epochs;
  report.run_id = report.task + "-" + report.mode + "-s" + std::to_string(cfg.seed);

  std::vector<size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss_sum = 0.0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      opt.zero_grad();
      Tensor batch_loss;
      for (size_t b = start; b < stop; ++b) {
        const PreparedGraph& pg = train_data[order[b]];
        ForwardResult out = model.forward(pg.inputs);
        Tensor l = task_loss(model, out, pg, cfg.task, cfg.lambda_bal, cfg.lambda_ent);
        l = ops::add(l, ops::scalar_mul(out.l_cos, cfg.model.beta));
        batch_loss = batch_loss.defined() ? ops::add(batch_loss, l) : l;
      }
      batch_loss = ops::scalar_mul(batch_loss, 1.0 / static_cast<double>(stop - start));
      backward(batch_loss);

      const double loss_value = batch_loss.item();
      if (!std::isfinite(loss_value)) {
        const GradNormSummary gn = grad_norms(model.named_parameters());
        throw NanAbortError("non-finite loss " + std::to_string(loss_value) + " at epoch " +
                            std::to_string(epoch) + " (learning rate " +
                            std::to_string(cfg.optim.learning_rate) + ", global grad norm " +
                            std::to_string(gn.global) + ", worst " + gn.worst_name + " norm " +
                            std::to_string(gn.worst) + ")");
      }
      const double norm = opt.step();
      if (!std::isfinite(norm)) {
        const GradNormSummary gn = grad_norms(model.named_parameters());
        throw NanAbortError("non-finite gradients at epoch " + std::to_string(epoch) +
                            " (learning rate " + std::to_string(cfg.optim.learning_rate) +
                            ", global grad norm " + std::to_string(gn.global) + ", worst " +
                            gn.worst_name + " norm " + std::to_string(gn.worst) + ")");
      }
      epoch_loss_sum += loss_value * static_cast<double>(stop - start);
    }
    report.epoch_losses.push_back(epoch_loss_sum / static_cast<double>(train_data.size()));

    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      for (auto& [es, data] : eval_data) {
        const TaskMetrics tm = evaluate_model(model, cfg.task, data, cfg.lambda_bal, cfg.lambda_ent);
        for (const auto& [name, value] : tm.metrics)
          report.metrics.push_back({report.run_id, report.task, es->dataset, es->split, name,
                                    value, cfg.seed, epoch});
        report.metrics.push_back(
            {report.run_id, report.task, es->dataset, es->split, "loss", tm.loss, cfg.seed, epoch});
      }
    }
  }

  report.final_mean_cosine = mean_pairwise_cosine(model, train_data);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(model), std::move(report)};
}

std::string run_report_to_json(const RunReport& report) {
  json j;
  j["run_id"] = report.run_id;
  j["task"] = report.task;
  j["mode"] = report.mode;
  j["seed"] = report.seed;
  j["epochs"] = report.epochs;
  j["epoch_losses"] = report.epoch_losses;
  j["wall_clock_seconds"] = report.wall_clock_seconds;
  j["final_mean_cosine"] = report.final_mean_cosine;
  j["checkpoint"] = report.checkpoint_path;
  json rows = json::array();
  for (const auto& r : report.metrics) {
    rows.push_back({{"run_id", r.run_id},
                    {"task", r.task},
                    {"dataset", r.dataset},
                    {"split", r.split},
                    {"metric", r.metric},
                    {"value", r.value},
                    {"seed", r.seed},
                    {"epoch", r.epoch}});
  }
  j["metrics"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace mnnas
