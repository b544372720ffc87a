// SPDX-License-Identifier: Apache-2.0
// Experiment driver: dataset generation, training, evaluation, and op-
// preference export, all seeded from --seed via named substreams so every
// command is byte-reproducible.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mnnas/io.hpp"
#include "mnnas/rng.hpp"
#include "mnnas/synth.hpp"
#include "mnnas/trainer.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace mnnas;

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& [key, val] : j.items())
    if (!known.count(key)) throw std::invalid_argument(where + ": unknown key: " + key);
}

// A dataset is either a file/directory on disk or a generator spec expanded
// in memory with a seed derived from the run seed (substream "datagen/<name>").
struct DataRef {
  std::string name;
  std::string split;
  std::optional<std::string> path;
  std::optional<GeneratorSpec> spec;
};

DataRef parse_data_ref(const json& j, const std::string& default_split,
                       const std::string& where) {
  check_keys(j, {"name", "split", "path", "spec"}, where);
  DataRef ref;
  ref.name = j.value("name", std::string{});
  ref.split = j.value("split", default_split);
  if (j.contains("path")) ref.path = j.at("path").get<std::string>();
  if (j.contains("spec")) ref.spec = generator_spec_from_json(j.at("spec").dump());
  if (ref.path.has_value() == ref.spec.has_value())
    throw std::invalid_argument(where + ": give exactly one of \"path\" or \"spec\"");
  if (ref.name.empty()) {
    if (ref.spec) ref.name = ref.spec->family;
    else ref.name = fs::path(*ref.path).stem().string();
  }
  return ref;
}

std::vector<Graph> resolve_data(const DataRef& ref, uint64_t run_seed) {
  if (ref.path) {
    fs::path p(*ref.path);
    if (fs::is_directory(p)) p /= ref.split + ".jsonl";
    return load_dataset(p);
  }
  GeneratorSpec spec = *ref.spec;
  spec.seed = substream(run_seed, "datagen/" + ref.name).next_u64();
  DatasetBundle bundle = generate_dataset(spec);
  if (ref.split == "train") return std::move(bundle.train);
  if (ref.split == "test") return std::move(bundle.test);
  throw std::invalid_argument("dataset " + ref.name + ": unknown split: " + ref.split);
}

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<int64_t> epochs;
};

fs::path required_out_dir(const json& j, const Overrides& ov) {
  if (ov.out) return *ov.out;
  if (j.contains("out_dir")) return j.at("out_dir").get<std::string>();
  throw std::invalid_argument("no output directory: set \"out_dir\" in the config or pass --out");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_gen(const std::string& config_path, const Overrides& ov) {
  GeneratorSpec spec = generator_spec_from_json(slurp(config_path));
  if (ov.seed) spec.seed = *ov.seed;
  spec.validate();
  if (!ov.out) throw std::invalid_argument("gen: --out <dir> is required");
  const fs::path dir(*ov.out);
  save_dataset_dir(dir, spec, generate_dataset(spec));
  std::cout << "wrote " << (dir / "train.jsonl").string() << " (" << spec.train_count
            << " graphs), " << (dir / "test.jsonl").string() << " (" << spec.test_count
            << " graphs)\n";
  return 0;
}

TrainConfig parse_train_config(const json& j) {
  TrainConfig cfg;
  cfg.task = parse_task(j.at("task").get<std::string>());
  if (j.contains("model")) cfg.model = model_config_from_json(j.at("model").dump());
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, {"learning_rate", "weight_decay", "beta1", "beta2", "eps", "clip_norm"},
               "optimizer");
    cfg.optim.learning_rate = o.value("learning_rate", cfg.optim.learning_rate);
    cfg.optim.weight_decay = o.value("weight_decay", cfg.optim.weight_decay);
    cfg.optim.beta1 = o.value("beta1", cfg.optim.beta1);
    cfg.optim.beta2 = o.value("beta2", cfg.optim.beta2);
    cfg.optim.eps = o.value("eps", cfg.optim.eps);
    cfg.optim.clip_norm = o.value("clip_norm", cfg.optim.clip_norm);
  }
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.lambda_bal = j.value("lambda_bal", cfg.lambda_bal);
  cfg.lambda_ent = j.value("lambda_ent", cfg.lambda_ent);
  cfg.feature_aug_dim = j.value("feature_aug_dim", cfg.feature_aug_dim);
  cfg.feature_aug_scale = j.value("feature_aug_scale", cfg.feature_aug_scale);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.eval_every = j.value("eval_every", cfg.eval_every);
  return cfg;
}

int cmd_train(const std::string& config_path, const Overrides& ov) {
  const json j = json::parse(slurp(config_path));
  check_keys(j,
             {"task", "model", "optimizer", "epochs", "batch_size", "lambda_bal", "lambda_ent",
              "feature_aug_dim", "feature_aug_scale", "seed", "eval_every", "train_data",
              "eval_data", "out_dir"},
             "experiment config");
  TrainConfig cfg = parse_train_config(j);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.mode) cfg.model.mode = parse_search_mode(*ov.mode);
  if (ov.epochs) cfg.epochs = *ov.epochs;
  cfg.validate();
  const fs::path out_dir = required_out_dir(j, ov);

  if (!j.contains("train_data"))
    throw std::invalid_argument("experiment config: missing \"train_data\"");
  const DataRef train_ref = parse_data_ref(j.at("train_data"), "train", "train_data");
  std::vector<Graph> train_graphs = resolve_data(train_ref, cfg.seed);

  std::vector<EvalSet> eval_sets;
  if (j.contains("eval_data")) {
    const json& arr = j.at("eval_data");
    if (!arr.is_array()) throw std::invalid_argument("eval_data: expected an array");
    for (const auto& entry : arr) {
      const DataRef ref = parse_data_ref(entry, "test", "eval_data");
      eval_sets.push_back({ref.name, ref.split, resolve_data(ref, cfg.seed)});
    }
  }

  TrainOutcome out = train(cfg, train_graphs, eval_sets);

  fs::create_directories(out_dir);
  const fs::path ckpt_path = out_dir / "checkpoint.json";
  save_checkpoint(ckpt_path, snapshot_model(out.model, to_string(cfg.task), cfg.feature_aug_dim,
                                            cfg.feature_aug_scale, cfg.seed));
  out.report.checkpoint_path = ckpt_path.string();
  write_text(out_dir / "report.json", run_report_to_json(out.report));
  write_metrics_csv(out_dir / "metrics.csv", out.report.metrics);

  std::cout << "run " << out.report.run_id << ": " << cfg.epochs << " epochs, final train loss "
            << format_double(out.report.epoch_losses.back()) << ", wall clock "
            << out.report.wall_clock_seconds << "s\n";
  for (const auto& row : out.report.metrics)
    if (row.epoch == cfg.epochs)
      std::cout << "  " << row.dataset << "/" << row.split << " " << row.metric << " = "
                << format_double(row.value) << "\n";
  std::cout << "artifacts in " << out_dir.string() << "\n";
  return 0;
}

// Shared by eval and explain: restore the checkpoint and prepare the single
// dataset named in the config with the training-time augmentation stream.
struct RestoredRun {
  Model model;
  Task task;
  Checkpoint ckpt;
  DataRef ref;
  std::vector<PreparedGraph> data;
};

RestoredRun restore_run(const json& j, const Overrides& ov) {
  if (!j.contains("checkpoint"))
    throw std::invalid_argument("config: missing \"checkpoint\" path");
  Checkpoint ckpt = load_checkpoint(j.at("checkpoint").get<std::string>());
  Model model = restore_model(ckpt);
  const Task task = parse_task(ckpt.task);
  const DataRef ref = parse_data_ref(j.at("data"), "test", "data");
  const uint64_t gen_seed = ov.seed ? *ov.seed : ckpt.seed;
  std::vector<Graph> graphs = resolve_data(ref, gen_seed);
  auto data = prepare_dataset(graphs, ckpt.feature_aug_dim, ckpt.seed, model.config().d_i,
                              ckpt.feature_aug_scale);
  return {std::move(model), task, std::move(ckpt), ref, std::move(data)};
}

int cmd_eval(const std::string& config_path, const Overrides& ov) {
  const json j = json::parse(slurp(config_path));
  check_keys(j, {"checkpoint", "data", "lambda_bal", "lambda_ent", "out_dir"}, "eval config");
  RestoredRun run = restore_run(j, ov);
  const TaskMetrics tm = evaluate_model(run.model, run.task, run.data,
                                        j.value("lambda_bal", 1.0), j.value("lambda_ent", 0.1));

  const std::string run_id = "eval-" + run.ckpt.task + "-s" + std::to_string(run.ckpt.seed);
  std::vector<MetricsRow> rows;
  for (const auto& [name, value] : tm.metrics)
    rows.push_back({run_id, run.ckpt.task, run.ref.name, run.ref.split, name, value,
                    run.ckpt.seed, 0});
  rows.push_back(
      {run_id, run.ckpt.task, run.ref.name, run.ref.split, "loss", tm.loss, run.ckpt.seed, 0});

  for (const auto& row : rows)
    std::cout << row.dataset << "/" << row.split << " " << row.metric << " = "
              << format_double(row.value) << "\n";
  if (ov.out || j.contains("out_dir")) {
    const fs::path out_dir = required_out_dir(j, ov);
    fs::create_directories(out_dir);
    write_metrics_csv(out_dir / "metrics.csv", rows);
    std::cout << "metrics in " << (out_dir / "metrics.csv").string() << "\n";
  }
  return 0;
}

int cmd_explain(const std::string& config_path, const Overrides& ov) {
  const json j = json::parse(slurp(config_path));
  check_keys(j, {"checkpoint", "data", "out_dir"}, "explain config");
  RestoredRun run = restore_run(j, ov);
  const auto table = explain_preferences(run.model, run.data);
  const auto& op_names = run.model.config().op_names;

  std::ostringstream csv;
  for (size_t k = 0; k < op_names.size(); ++k) csv << (k ? "," : "") << op_names[k];
  csv << "\n";
  for (const auto& row : table) {
    for (size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << format_double(row[k]);
    csv << "\n";
  }
  std::cout << csv.str();
  if (ov.out || j.contains("out_dir")) {
    const fs::path out_dir = required_out_dir(j, ov);
    fs::create_directories(out_dir);
    write_text(out_dir / "preferences.csv", csv.str());
    std::cout << "preferences in " << (out_dir / "preferences.csv").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"node-specific differentiable architecture search over graph operations"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    Overrides ov;
  };
  auto add_common = [](CLI::App* sub, SubArgs& args, bool with_model_flags) {
    sub->add_option("--config", args.config, "JSON config file")->required();
    auto* seed = sub->add_option("--seed", "seed override (u64)");
    seed->each([&args](const std::string& s) { args.ov.seed = std::stoull(s); });
    auto* out = sub->add_option("--out", "output directory override");
    out->each([&args](const std::string& s) { args.ov.out = s; });
    if (with_model_flags) {
      auto* mode = sub->add_option("--mode", "search mode override")
                       ->check(CLI::IsMember({"mnnas", "nodenas_single_dim", "graph_level_nas"}));
      mode->each([&args](const std::string& s) { args.ov.mode = s; });
      auto* epochs = sub->add_option("--epochs", "epoch count override");
      epochs->each([&args](const std::string& s) { args.ov.epochs = std::stoll(s); });
    }
  };

  SubArgs gen_args, train_args, eval_args, explain_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a dataset directory from a generator spec");
  add_common(gen, gen_args, false);
  CLI::App* train_cmd = app.add_subcommand("train", "train a model from an experiment config");
  add_common(train_cmd, train_args, true);
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  add_common(eval_cmd, eval_args, false);
  CLI::App* explain_cmd =
      app.add_subcommand("explain", "export per-degree-quintile op preferences");
  add_common(explain_cmd, explain_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args.config, gen_args.ov);
    if (train_cmd->parsed()) return cmd_train(train_args.config, train_args.ov);
    if (eval_cmd->parsed()) return cmd_eval(eval_args.config, eval_args.ov);
    if (explain_cmd->parsed()) return cmd_explain(explain_args.config, explain_args.ov);
  } catch (const NanAbortError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
