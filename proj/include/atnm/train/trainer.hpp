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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "atnm/features/spectrogram.hpp"
#include "atnm/metrics/f1.hpp"
#include "atnm/model.hpp"
#include "atnm/nn/checkpoint.hpp"
#include "atnm/train/config.hpp"

namespace atnm {

/// Seeded random split; the validation side gets round(fraction * N)
/// examples. Throws ConfigError if either side would be empty.
std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split_train_val(
    std::span<const LabeledExample> examples, double fraction, std::uint64_t seed);

/// Patience counted in epochs since the best score; only strict
/// improvements reset it.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);

  /// Records one epoch; returns true if it is a new best.
  bool update(double score);
  bool should_stop() const { return epochs_ > 0 && epochs_ - best_epoch_ >= patience_; }
  double best() const { return best_; }
  /// 1-based; 0 before the first update.
  std::size_t best_epoch() const { return best_epoch_; }
  std::size_t epochs() const { return epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t best_epoch_ = 0;
  double best_ = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_macro_f1 = 0.0;
  double best_so_far = 0.0;
  std::size_t optimizer_steps = 0;  // not part of the JSON record
};

nlohmann::json to_json(const EpochRecord& record);

struct RunRecord {
  nlohmann::json config;  // fully resolved TrainConfig
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_f1 = 0.0;
  std::string stop_reason;  // "patience" | "max_epochs"
  std::string checkpoint_path;

  /// One JSON object per epoch, newline-terminated.
  std::string json_lines() const;
};

struct TrainResult {
  RunRecord record;
  Checkpoint checkpoint;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Splits `examples` into train/val with config.seed, then trains.
TrainResult train(const TrainConfig& config, std::span<const LabeledExample> examples,
                  const std::vector<std::string>& class_names, const TrainHooks& hooks = {});

/// Trains on a fixed split. The checkpoint holds the parameters of the
/// epoch with the best validation macro F1.
TrainResult train_on_split(const TrainConfig& config, std::span<const LabeledExample> train_set,
                           std::span<const LabeledExample> val_set, const std::vector<std::string>& class_names,
                           const TrainHooks& hooks = {});

/// Seed for the evaluation generator of a run; fixed per training seed so
/// stochastic models evaluate reproducibly.
std::uint64_t eval_seed_for(std::uint64_t train_seed);

/// Counts over `examples` using a fresh generator seeded with `eval_seed`.
ClassCounts evaluate_model(const Model& model, std::span<const LabeledExample> examples, std::uint64_t eval_seed);

/// Rebuilds the model from a checkpoint. Throws FormatError if the tensors do
/// not fit the recorded architecture.
std::unique_ptr<Model> model_from_checkpoint(const Checkpoint& checkpoint);

struct EvalReport {
  ClassCounts counts;
  F1Table table;
};

/// Throws ConfigError for an empty dataset.
EvalReport evaluate(const Checkpoint& checkpoint, std::span<const LabeledExample> examples,
                    const std::vector<std::string>& class_names);

}  // namespace atnm
