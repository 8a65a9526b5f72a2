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

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "atnm/features/spectrogram.hpp"
#include "atnm/loss/losses.hpp"
#include "atnm/nn/parameter.hpp"

namespace atnm {

struct PatchSize {
  std::size_t frames;
  std::size_t bins;
  friend bool operator==(const PatchSize&, const PatchSize&) = default;
};

/// Architecture of either model family. Fields that do not apply to the
/// chosen variant are ignored; empty encoder/core/glimpse_sizes take the
/// variant's defaults (see resolve_model_config).
struct ModelConfig {
  std::string variant = "AttTF";
  std::size_t frames = 998;
  std::size_t bins = 64;
  std::size_t classes = 20;

  // AttentionMIC family
  std::size_t time_tiles = 60;
  std::size_t freq_tiles = 4;
  std::size_t patch_hidden = 512;
  std::size_t feature_dim = 128;

  // Sightreader / RAM family
  std::size_t glimpses = 16;
  std::size_t hidden = 256;
  std::size_t glimpse_features = 128;
  double sigma = 0.17;
  std::vector<PatchSize> glimpse_sizes;
  std::string encoder;  // "flat-fc" | "rect-conv"
  std::string core;     // "gru" | "rnn"
  std::size_t conv_maps = 8;
};

inline const std::vector<std::string>& mil_variants() {
  static const std::vector<std::string> v{"AttTF", "AttTFid", "AttT", "FC"};
  return v;
}
inline const std::vector<std::string>& ram_variants() {
  static const std::vector<std::string> v{"SR16", "SR16-FL", "RAM16-RNN", "RAM16-GRU"};
  return v;
}
bool is_mil_variant(const std::string& tag);
bool is_ram_variant(const std::string& tag);
/// Throws ConfigError listing every valid tag.
void require_known_variant(const std::string& tag);
/// Loss the variant is trained with by default (focal for SR16-FL only).
LossKind default_loss(const std::string& tag);

/// Fills variant defaults and validates the geometry.
ModelConfig resolve_model_config(ModelConfig cfg);
nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct ExampleStats {
  double loss = 0.0;
  double classification = 0.0;
  double reward = 0.0;
  double advantage = 0.0;
  double baseline_mse = 0.0;
};

class Model {
 public:
  virtual ~Model() = default;
  Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  virtual const ModelConfig& config() const = 0;
  virtual ParamList parameters() = 0;
  virtual bool stochastic() const = 0;

  /// Recording-level prediction in [0,1]^C. Deterministic models ignore rng.
  virtual std::vector<double> predict(const Spectrogram& x, Rng& rng) const = 0;

  /// Forward and backward for one example; parameter gradients are scaled by
  /// `scale` and added to the grad tensors.
  virtual ExampleStats accumulate(const LabeledExample& example, const Objective& objective, double scale,
                                  Rng& rng) = 0;

  const std::string& variant() const { return config().variant; }
};

/// Builds the model for cfg.variant with weights drawn from `seed`.
std::unique_ptr<Model> make_model(const ModelConfig& cfg, std::uint64_t seed);

}  // namespace atnm
