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

#include "atnm/model.hpp"

#include <algorithm>

#include "atnm/error.hpp"
#include "atnm/mil/attention_mic.hpp"
#include "atnm/nn/recurrent.hpp"
#include "atnm/ram/sightreader.hpp"

namespace atnm {

bool is_mil_variant(const std::string& tag) {
  return std::find(mil_variants().begin(), mil_variants().end(), tag) != mil_variants().end();
}

bool is_ram_variant(const std::string& tag) {
  return std::find(ram_variants().begin(), ram_variants().end(), tag) != ram_variants().end();
}

void require_known_variant(const std::string& tag) {
  if (is_mil_variant(tag) || is_ram_variant(tag)) return;
  std::string valid;
  for (const auto* list : {&mil_variants(), &ram_variants()}) {
    for (const auto& v : *list) valid += (valid.empty() ? "" : ", ") + v;
  }
  throw ConfigError("unknown variant '" + tag + "'; valid variants: " + valid);
}

LossKind default_loss(const std::string& tag) {
  require_known_variant(tag);
  return tag == "SR16-FL" ? LossKind::Focal : LossKind::Bce;
}

ModelConfig resolve_model_config(ModelConfig cfg) {
  require_known_variant(cfg.variant);
  if (cfg.frames == 0 || cfg.bins == 0) throw ConfigError("spectrogram dimensions must be positive");
  if (cfg.classes == 0) throw ConfigError("at least one class required");
  if (is_mil_variant(cfg.variant)) {
    if (cfg.time_tiles == 0 || cfg.freq_tiles == 0 || cfg.time_tiles > cfg.frames || cfg.freq_tiles > cfg.bins) {
      throw ConfigError("tile grid " + std::to_string(cfg.time_tiles) + "x" + std::to_string(cfg.freq_tiles) +
                        " does not fit a " + std::to_string(cfg.frames) + "x" + std::to_string(cfg.bins) +
                        " spectrogram");
    }
    if (cfg.patch_hidden == 0 || cfg.feature_dim == 0) throw ConfigError("layer widths must be positive");
    return cfg;
  }
  const bool sightreader = cfg.variant == "SR16" || cfg.variant == "SR16-FL";
  if (cfg.glimpse_sizes.empty()) {
    cfg.glimpse_sizes = sightreader ? std::vector<PatchSize>{{12, 12}, {24, 24}} : std::vector<PatchSize>{{12, 12}};
  }
  if (cfg.encoder.empty()) cfg.encoder = sightreader ? "rect-conv" : "flat-fc";
  if (cfg.core.empty()) cfg.core = cfg.variant == "RAM16-RNN" ? "rnn" : "gru";
  parse_encoder(cfg.encoder);
  parse_core(cfg.core);
  try {
    validate_glimpse_sizes(cfg.glimpse_sizes);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  if (cfg.encoder == "rect-conv" && (cfg.glimpse_sizes.front().frames < 7 || cfg.glimpse_sizes.front().bins < 7)) {
    throw ConfigError("rect-conv kernels need glimpse patches of at least 7x7 cells");
  }
  if (cfg.glimpses == 0) throw ConfigError("at least one glimpse required");
  if (!(cfg.sigma > 0.0)) throw ConfigError("location sigma must be positive");
  if (cfg.hidden == 0 || cfg.glimpse_features == 0 || cfg.conv_maps == 0) {
    throw ConfigError("layer widths must be positive");
  }
  return cfg;
}

nlohmann::json to_json(const ModelConfig& cfg) {
  nlohmann::json j = {{"variant", cfg.variant}, {"frames", cfg.frames}, {"bins", cfg.bins}, {"classes", cfg.classes}};
  if (is_mil_variant(cfg.variant)) {
    j["time_tiles"] = cfg.time_tiles;
    j["freq_tiles"] = cfg.freq_tiles;
    j["patch_hidden"] = cfg.patch_hidden;
    j["feature_dim"] = cfg.feature_dim;
  } else {
    j["glimpses"] = cfg.glimpses;
    j["hidden"] = cfg.hidden;
    j["glimpse_features"] = cfg.glimpse_features;
    j["sigma"] = cfg.sigma;
    nlohmann::json sizes = nlohmann::json::array();
    for (const auto& s : cfg.glimpse_sizes) sizes.push_back({s.frames, s.bins});
    j["glimpse_sizes"] = sizes;
    j["encoder"] = cfg.encoder;
    j["core"] = cfg.core;
    j["conv_maps"] = cfg.conv_maps;
  }
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  try {
    cfg.variant = j.value("variant", cfg.variant);
    cfg.frames = j.value("frames", cfg.frames);
    cfg.bins = j.value("bins", cfg.bins);
    cfg.classes = j.value("classes", cfg.classes);
    cfg.time_tiles = j.value("time_tiles", cfg.time_tiles);
    cfg.freq_tiles = j.value("freq_tiles", cfg.freq_tiles);
    cfg.patch_hidden = j.value("patch_hidden", cfg.patch_hidden);
    cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
    cfg.glimpses = j.value("glimpses", cfg.glimpses);
    cfg.hidden = j.value("hidden", cfg.hidden);
    cfg.glimpse_features = j.value("glimpse_features", cfg.glimpse_features);
    cfg.sigma = j.value("sigma", cfg.sigma);
    if (j.contains("glimpse_sizes")) {
      for (const auto& s : j.at("glimpse_sizes")) {
        const auto v = s.get<std::vector<std::size_t>>();
        if (v.size() != 2) throw ConfigError("glimpse sizes are given as [frames, bins]");
        cfg.glimpse_sizes.push_back({v[0], v[1]});
      }
    }
    cfg.encoder = j.value("encoder", cfg.encoder);
    cfg.core = j.value("core", cfg.core);
    cfg.conv_maps = j.value("conv_maps", cfg.conv_maps);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  return resolve_model_config(std::move(cfg));
}

std::unique_ptr<Model> make_model(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const ModelConfig resolved = resolve_model_config(cfg);
  if (is_mil_variant(resolved.variant)) return std::make_unique<AttentionMic>(resolved, rng);
  return std::make_unique<Sightreader>(resolved, rng);
}

}  // namespace atnm
