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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atnm/features/synth.hpp"
#include "atnm/loss/losses.hpp"
#include "atnm/model.hpp"
#include "atnm/nn/adam.hpp"

namespace atnm {

struct TrainConfig {
  ModelConfig model;  // carries the variant tag, glimpse count and sigma
  std::size_t batch_size = 32;
  double lr = 5e-4;
  double weight_decay = 1e-4;
  std::size_t max_epochs = 250;
  std::size_t patience = 10;
  double val_fraction = 0.15;
  LossKind loss = LossKind::Bce;
  double focal_gamma = 2.0;
  double baseline_weight = 1.0;
  std::uint64_t seed = 0;

  AdamConfig adam() const { return {lr, 0.9, 0.999, 1e-8, weight_decay}; }
};

void validate(const TrainConfig& cfg);

/// Everything one CLI invocation needs.
struct ExperimentConfig {
  TrainConfig train;
  std::string dataset;
  std::string out = "runs";
  std::vector<std::uint64_t> seeds{0};
  SynthConfig synth;
};

/// Missing keys take the defaults above; "loss" defaults to the variant's
/// loss. Throws ConfigError on unknown keys or bad values.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);

ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace atnm
