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

#include "atnm/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atnm/error.hpp"
#include "atnm/features/synth.hpp"
#include "atnm/nn/adam.hpp"

namespace atnm {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kEvalStream = 3;
constexpr std::uint64_t kSplitStream = 4;

void check_examples(const ModelConfig& cfg, std::span<const LabeledExample> examples, const char* what) {
  for (const auto& ex : examples) {
    if (ex.spectrogram.frames != cfg.frames || ex.spectrogram.bins != cfg.bins || ex.classes() != cfg.classes) {
      throw ConfigError(std::string(what) + " example '" + ex.id + "' is " + std::to_string(ex.spectrogram.frames) +
                        "x" + std::to_string(ex.spectrogram.bins) + " with " + std::to_string(ex.classes()) +
                        " classes; model expects " + std::to_string(cfg.frames) + "x" + std::to_string(cfg.bins) +
                        " with " + std::to_string(cfg.classes));
    }
  }
}

double quantized_val_f1(Model& model, std::span<const LabeledExample> val_set, std::uint64_t eval_seed) {
  const ParamList params = model.parameters();
  std::vector<std::vector<double>> saved;
  saved.reserve(params.size());
  for (const Parameter* p : params) saved.push_back(p->value.storage());
  quantize_to_checkpoint_precision(params);
  const double f1 = macro_f1(evaluate_model(model, val_set, eval_seed));
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value.storage() = std::move(saved[i]);
  return f1;
}

}  // namespace

std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split_train_val(
    std::span<const LabeledExample> examples, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
  const std::size_t n = examples.size();
  const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_val == 0 || n_val >= n) {
    throw ConfigError("validation fraction " + std::to_string(fraction) + " of " + std::to_string(n) +
                      " examples leaves an empty side");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, kSplitStream));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::sort(val_idx.begin(), val_idx.end());
  std::vector<bool> is_val(n, false);
  for (std::size_t i : val_idx) is_val[i] = true;
  std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> out;
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? out.second : out.first).push_back(examples[i]);
  return out;
}

EarlyStopping::EarlyStopping(std::size_t patience) : patience_(patience) {
  if (patience == 0) throw ConfigError("patience must be at least 1");
}

bool EarlyStopping::update(double score) {
  ++epochs_;
  if (best_epoch_ == 0 || score > best_) {
    best_ = score;
    best_epoch_ = epochs_;
    return true;
  }
  return false;
}

nlohmann::json to_json(const EpochRecord& r) {
  return {{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_macro_f1", r.val_macro_f1},
          {"best_so_far", r.best_so_far}};
}

std::string RunRecord::json_lines() const {
  std::string out;
  for (const auto& e : epochs) out += to_json(e).dump() + "\n";
  return out;
}

std::uint64_t eval_seed_for(std::uint64_t train_seed) { return derive_seed(train_seed, kEvalStream); }

TrainResult train(const TrainConfig& config, std::span<const LabeledExample> examples,
                  const std::vector<std::string>& class_names, const TrainHooks& hooks) {
  auto [train_set, val_set] = split_train_val(examples, config.val_fraction, config.seed);
  return train_on_split(config, train_set, val_set, class_names, hooks);
}

TrainResult train_on_split(const TrainConfig& config, std::span<const LabeledExample> train_set,
                           std::span<const LabeledExample> val_set, const std::vector<std::string>& class_names,
                           const TrainHooks& hooks) {
  validate(config);
  TrainConfig cfg = config;
  cfg.model = resolve_model_config(config.model);
  if (train_set.empty() || val_set.empty()) throw ConfigError("training and validation sets must be nonempty");
  check_examples(cfg.model, train_set, "training");
  check_examples(cfg.model, val_set, "validation");

  auto model = make_model(cfg.model, derive_seed(cfg.seed, kInitStream));
  const ParamList params = model->parameters();
  Adam adam(cfg.adam(), params);
  Objective objective{cfg.loss, cfg.focal_gamma, {}, cfg.baseline_weight};
  if (cfg.loss == LossKind::Focal) objective.weights = class_weights(train_set, cfg.model.classes);

  const std::uint64_t eval_seed = eval_seed_for(cfg.seed);
  const nlohmann::json config_json = to_json(cfg);
  Rng rng(derive_seed(cfg.seed, kTrainStream));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.record.config = config_json;
  EarlyStopping stopper(cfg.patience);
  result.record.stop_reason = "max_epochs";

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    std::size_t batch_index = 0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::size_t usable = 0;
      for (std::size_t i = start; i < stop; ++i) usable += train_set[order[i]].known_count() > 0 ? 1 : 0;
      if (usable == 0) continue;
      const double scale = 1.0 / static_cast<double>(usable);
      const auto context = [&] {
        return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index);
      };
      for (std::size_t i = start; i < stop; ++i) {
        const LabeledExample& ex = train_set[order[i]];
        if (ex.known_count() == 0) continue;
        const ExampleStats stats = model->accumulate(ex, objective, scale, rng);
        if (!std::isfinite(stats.loss)) {
          throw TrainingError("non-finite loss at " + context() + " (example '" + ex.id + "')");
        }
        loss_sum += stats.loss;
        ++loss_count;
      }
      try {
        adam.step();
        ++steps;
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " at " + context());
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.optimizer_steps = steps;
    rec.train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    rec.val_macro_f1 = quantized_val_f1(*model, val_set, eval_seed);
    const bool improved = stopper.update(rec.val_macro_f1);
    rec.best_so_far = stopper.best();
    result.record.epochs.push_back(rec);
    if (improved) {
      nlohmann::json meta = {{"train_config", config_json},
                             {"seed", cfg.seed},
                             {"eval_seed", eval_seed},
                             {"epoch", epoch},
                             {"val_macro_f1", rec.val_macro_f1},
                             {"class_names", class_names}};
      result.checkpoint = capture_checkpoint(cfg.model.variant, to_json(cfg.model), std::move(meta), params);
    }
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (stopper.should_stop()) {
      result.record.stop_reason = "patience";
      break;
    }
  }
  result.record.best_epoch = stopper.best_epoch();
  result.record.best_val_f1 = stopper.best();
  return result;
}

ClassCounts evaluate_model(const Model& model, std::span<const LabeledExample> examples, std::uint64_t eval_seed) {
  ClassCounts counts(model.config().classes);
  Rng rng(eval_seed);
  for (const auto& ex : examples) {
    const std::vector<double> pred = model.predict(ex.spectrogram, rng);
    accumulate(counts, pred, ex.labels, ex.known);
  }
  return counts;
}

std::unique_ptr<Model> model_from_checkpoint(const Checkpoint& checkpoint) {
  ModelConfig cfg;
  try {
    cfg = model_config_from_json(checkpoint.model);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint architecture: ") + e.what());
  }
  if (cfg.variant != checkpoint.variant) {
    throw FormatError("checkpoint variant '" + checkpoint.variant + "' does not match its architecture '" +
                      cfg.variant + "'");
  }
  auto model = make_model(cfg, 0);
  restore_checkpoint(checkpoint, model->parameters());
  return model;
}

EvalReport evaluate(const Checkpoint& checkpoint, std::span<const LabeledExample> examples,
                    const std::vector<std::string>& class_names) {
  if (examples.empty()) throw ConfigError("cannot evaluate on an empty dataset");
  auto model = model_from_checkpoint(checkpoint);
  check_examples(model->config(), examples, "evaluation");
  const std::uint64_t seed = checkpoint.metadata.value("eval_seed", std::uint64_t{0});
  EvalReport report{evaluate_model(*model, examples, seed), {}};
  report.table = f1_table(report.counts, class_names);
  return report;
}

}  // namespace atnm
