// Copyright 2026 The atnm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "atnm/error.hpp"
#include "atnm/features/synth.hpp"
#include "atnm/metrics/f1.hpp"
#include "atnm/nn/checkpoint.hpp"
#include "atnm/ram/sightreader.hpp"
#include "atnm/train/config.hpp"
#include "atnm/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace atnm;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kAbort = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string split = "test";
  std::vector<std::string> checkpoints;
  std::vector<std::string> ids;
};

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

ExperimentConfig load_config(const Options& opt) {
  ExperimentConfig cfg =
      opt.config.empty() ? experiment_config_from_json(nlohmann::json::object()) : load_experiment_config(opt.config);
  if (opt.seed) cfg.seeds = {*opt.seed};
  cfg.train.seed = cfg.seeds.front();
  if (!opt.dataset.empty()) cfg.dataset = opt.dataset;
  return cfg;
}

std::string dataset_path(const Options& opt) {
  if (!opt.dataset.empty()) return opt.dataset;
  if (!opt.config.empty()) {
    const std::string path = load_experiment_config(opt.config).dataset;
    if (!path.empty()) return path;
  }
  throw ConfigError("no dataset given (use --dataset or a config with \"dataset\")");
}

int cmd_gen_data(const Options& opt) {
  ExperimentConfig cfg = load_config(opt);
  if (opt.seed) cfg.synth.seed = *opt.seed;
  const std::string dir = !opt.out.empty() ? opt.out : cfg.dataset;
  if (dir.empty()) throw ConfigError("no output directory given (use --out or \"dataset\")");
  const Dataset ds = synth_dataset(cfg.synth);
  save_dataset(ds, dir);

  std::size_t n_test = std::count(ds.splits.begin(), ds.splits.end(), "test");
  std::cout << "wrote " << ds.examples.size() << " examples (" << ds.examples.size() - n_test << " train, " << n_test
            << " test) to " << dir << "\n";
  std::cout << "class,positive_rate,known_rate\n";
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    std::size_t pos = 0;
    std::size_t known = 0;
    for (const auto& ex : ds.examples) {
      if (ex.state(c) == LabelState::Unknown) continue;
      ++known;
      pos += ex.state(c) == LabelState::Positive ? 1 : 0;
    }
    const double rate = known > 0 ? static_cast<double>(pos) / static_cast<double>(known) : 0.0;
    const double known_rate = static_cast<double>(known) / static_cast<double>(ds.examples.size());
    std::printf("%s,%.4f,%.4f\n", ds.class_names[c].c_str(), rate, known_rate);
  }
  return kOk;
}

std::size_t thread_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ATNM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v < 1) throw ConfigError("ATNM_THREADS must be at least 1");
      cap = static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("ATNM_THREADS is not a positive integer: '") + env + "'");
    }
  }
  return cap;
}

int classify(const std::exception& e);

int cmd_train(const Options& opt) {
  ExperimentConfig cfg = load_config(opt);
  if (cfg.dataset.empty()) throw ConfigError("no dataset given (use --dataset or \"dataset\")");
  if (!fs::exists(cfg.dataset)) throw ConfigError("dataset directory '" + cfg.dataset + "' does not exist");
  const std::string out_root = !opt.out.empty() ? opt.out : cfg.out;
  const Dataset ds = load_dataset(cfg.dataset);
  const std::vector<LabeledExample> train_split = ds.split("train");
  if (train_split.empty()) throw ConfigError("dataset has no training examples");

  // Geometry and class count always come from the data.
  TrainConfig base = cfg.train;
  base.model.frames = train_split.front().spectrogram.frames;
  base.model.bins = train_split.front().spectrogram.bins;
  base.model.classes = train_split.front().classes();
  base.model = resolve_model_config(base.model);
  validate(base);

  std::mutex io;
  std::vector<int> codes(cfg.seeds.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      TrainConfig tc = base;
      tc.seed = cfg.seeds[i];
      const fs::path dir = fs::path(out_root) / tc.model.variant / ("seed-" + std::to_string(tc.seed));
      try {
        TrainResult result = train(tc, train_split, ds.class_names);
        result.record.checkpoint_path = (dir / "checkpoint.atnm").string();
        fs::create_directories(dir);
        save_checkpoint(result.checkpoint, result.record.checkpoint_path);
        write_text(dir / "run.jsonl", result.record.json_lines());
        nlohmann::json summary = {{"config", result.record.config},
                                  {"dataset", cfg.dataset},
                                  {"best_epoch", result.record.best_epoch},
                                  {"best_val_macro_f1", result.record.best_val_f1},
                                  {"epochs_run", result.record.epochs.size()},
                                  {"stop_reason", result.record.stop_reason},
                                  {"checkpoint", "checkpoint.atnm"}};
        write_text(dir / "run.json", summary.dump(2) + "\n");
        std::lock_guard lock(io);
        std::printf("%s seed %llu: best val macro F1 %.4f at epoch %zu (%zu epochs, %s) -> %s\n",
                    tc.model.variant.c_str(), static_cast<unsigned long long>(tc.seed), result.record.best_val_f1,
                    result.record.best_epoch, result.record.epochs.size(), result.record.stop_reason.c_str(),
                    dir.string().c_str());
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        codes[i] = classify(e);
        std::cerr << "error: seed " << tc.seed << ": " << e.what() << "\n";
      }
    }
  };
  const std::size_t n_threads = std::min(thread_cap(), cfg.seeds.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return *std::max_element(codes.begin(), codes.end());
}

std::vector<LabeledExample> select_split(const Dataset& ds, const std::string& split, const Checkpoint& ck) {
  if (split == "test") return ds.split("test");
  const auto& tc = ck.metadata.at("train_config");
  auto [train_part, val_part] =
      split_train_val(ds.split("train"), tc.at("val_fraction").get<double>(), ck.metadata.at("seed").get<std::uint64_t>());
  return split == "val" ? val_part : train_part;
}

int cmd_eval(const Options& opt) {
  if (opt.checkpoints.empty()) throw ConfigError("eval needs at least one --checkpoint");
  const Dataset ds = load_dataset(dataset_path(opt));
  std::vector<F1Table> tables;
  std::string variant;
  for (std::size_t i = 0; i < opt.checkpoints.size(); ++i) {
    const Checkpoint ck = load_checkpoint(opt.checkpoints[i]);
    if (i == 0) variant = ck.variant;
    if (ck.variant != variant) {
      throw FormatError("checkpoint '" + opt.checkpoints[i] + "' is variant " + ck.variant + ", expected " + variant);
    }
    const std::vector<LabeledExample> examples = select_split(ds, opt.split, ck);
    const EvalReport report = evaluate(ck, examples, ds.class_names);
    tables.push_back(report.table);
    const std::string csv = metrics_csv(report.counts, ds.class_names);
    if (!opt.out.empty()) {
      const std::string stem = opt.checkpoints.size() == 1 ? "metrics" : "metrics-" + std::to_string(i);
      write_text(fs::path(opt.out) / (stem + ".csv"), csv);
      nlohmann::json j = metrics_json(report.counts, ds.class_names);
      j["checkpoint"] = opt.checkpoints[i];
      j["split"] = opt.split;
      j["variant"] = ck.variant;
      write_text(fs::path(opt.out) / (stem + ".json"), j.dump(2) + "\n");
    }
    if (opt.checkpoints.size() == 1) {
      std::cout << csv;
    } else {
      std::printf("# %s: macro F1 %.6f\n", opt.checkpoints[i].c_str(), report.table.macro);
    }
  }
  if (tables.size() > 1) {
    const std::string avg = f1_table_csv(seed_average(tables));
    if (!opt.out.empty()) write_text(fs::path(opt.out) / "f1_seed_average.csv", avg);
    std::cout << avg;
  }
  return kOk;
}

int cmd_trace(const Options& opt) {
  if (opt.checkpoints.size() != 1) throw ConfigError("trace needs exactly one --checkpoint");
  if (opt.ids.empty()) throw ConfigError("trace needs --ids");
  const Checkpoint ck = load_checkpoint(opt.checkpoints.front());
  if (!is_ram_variant(ck.variant)) {
    throw ConfigError("trace is not supported for " + ck.variant + " checkpoints (glimpse models only)");
  }
  auto model = model_from_checkpoint(ck);
  const auto& reader = dynamic_cast<const Sightreader&>(*model);
  const Dataset ds = load_dataset(dataset_path(opt));
  std::map<std::string, const LabeledExample*> by_id;
  for (const auto& ex : ds.examples) by_id[ex.id] = &ex;

  const std::uint64_t seed = opt.seed ? *opt.seed : ck.metadata.value("eval_seed", std::uint64_t{0});
  nlohmann::json all = nlohmann::json::array();
  for (const auto& id : opt.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("no example with id '" + id + "' in the dataset");
    const LabeledExample& ex = *it->second;
    Rng rng(derive_seed(seed, std::hash<std::string>{}(id)));
    Trajectory trajectory = reader.run_episode(ex.spectrogram, rng).trajectory;
    assign_rewards(trajectory, ex.labels, ex.known);
    nlohmann::json j = {{"id", id},
                        {"variant", ck.variant},
                        {"seed", seed},
                        {"glimpse_sizes", to_json(model->config())["glimpse_sizes"]},
                        {"labels", ex.labels},
                        {"known", ex.known},
                        {"trajectory", trajectory_json(trajectory)}};
    if (!opt.out.empty()) write_text(fs::path(opt.out) / (id + ".trace.json"), j.dump(2) + "\n");
    all.push_back(std::move(j));
  }
  if (opt.out.empty()) std::cout << all.dump(2) << "\n";
  return kOk;
}

int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const TrainingError*>(&e) || dynamic_cast<const LossError*>(&e)) return kAbort;
  return kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention models for multi-label instrument recognition on spectrograms"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the seed");
    sub->add_option("--out", opt.out, "output directory");
  };
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic spectrogram dataset");
  add_common(gen);
  auto* train_cmd = app.add_subcommand("train", "train one model per seed");
  add_common(train_cmd);
  train_cmd->add_option("--dataset", opt.dataset, "dataset directory (overrides the config)");
  auto* eval_cmd = app.add_subcommand("eval", "per-class and macro F1 of one or more checkpoints");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", opt.checkpoints, "checkpoint file (repeat to average seeds)")->required();
  eval_cmd->add_option("--dataset", opt.dataset, "dataset directory");
  eval_cmd->add_option("--split", opt.split, "split to evaluate")->check(CLI::IsMember({"train", "val", "test"}));
  auto* trace_cmd = app.add_subcommand("trace", "export glimpse trajectories of a glimpse model");
  add_common(trace_cmd);
  trace_cmd->add_option("--checkpoint", opt.checkpoints, "checkpoint file")->required();
  trace_cmd->add_option("--dataset", opt.dataset, "dataset directory");
  trace_cmd->add_option("--ids", opt.ids, "example ids")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }
  for (auto* sub : {gen, train_cmd, eval_cmd, trace_cmd}) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }

  try {
    if (*gen) return cmd_gen_data(opt);
    if (*train_cmd) return cmd_train(opt);
    if (*eval_cmd) return cmd_eval(opt);
    return cmd_trace(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  }
}
