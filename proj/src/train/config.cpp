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

#include "atnm/train/config.hpp"

#include <fstream>
#include <set>

#include "atnm/error.hpp"

namespace atnm {

void validate(const TrainConfig& cfg) {
  resolve_model_config(cfg.model);
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(cfg.lr >= 0.0)) throw ConfigError("lr must be nonnegative");
  if (!(cfg.weight_decay >= 0.0)) throw ConfigError("weight_decay must be nonnegative");
  if (cfg.max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (cfg.patience == 0) throw ConfigError("patience must be at least 1");
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0)) throw ConfigError("val_fraction must lie in (0, 1)");
  if (!(cfg.focal_gamma >= 0.0)) throw ConfigError("focal_gamma must be nonnegative");
  if (!(cfg.baseline_weight >= 0.0)) throw ConfigError("baseline_weight must be nonnegative");
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {"variant",      "loss",     "batch_size",    "lr",
                                              "weight_decay", "max_epochs", "patience",    "val_fraction",
                                              "focal_gamma",  "baseline_weight", "glimpses", "sigma",
                                              "seed",         "seeds",    "dataset",       "out",
                                              "model",        "synth"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  TrainConfig& t = cfg.train;
  try {
    nlohmann::json model = j.value("model", nlohmann::json::object());
    if (j.contains("variant")) model["variant"] = j["variant"];
    if (j.contains("glimpses")) model["glimpses"] = j["glimpses"];
    if (j.contains("sigma")) model["sigma"] = j["sigma"];
    t.model = model_config_from_json(model);
    t.loss = j.contains("loss") ? parse_loss(j["loss"].get<std::string>()) : default_loss(t.model.variant);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.lr = j.value("lr", t.lr);
    t.weight_decay = j.value("weight_decay", t.weight_decay);
    t.max_epochs = j.value("max_epochs", t.max_epochs);
    t.patience = j.value("patience", t.patience);
    t.val_fraction = j.value("val_fraction", t.val_fraction);
    t.focal_gamma = j.value("focal_gamma", t.focal_gamma);
    t.baseline_weight = j.value("baseline_weight", t.baseline_weight);
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    else if (j.contains("seed")) cfg.seeds = {j["seed"].get<std::uint64_t>()};
    cfg.dataset = j.value("dataset", cfg.dataset);
    cfg.out = j.value("out", cfg.out);
    if (j.contains("synth")) cfg.synth = synth_config_from_json(j["synth"]);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (cfg.seeds.empty()) throw ConfigError("seed list must not be empty");
  t.seed = cfg.seeds.front();
  validate(t);
  return cfg;
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"variant", cfg.model.variant},
          {"model", to_json(cfg.model)},
          {"batch_size", cfg.batch_size},
          {"lr", cfg.lr},
          {"weight_decay", cfg.weight_decay},
          {"max_epochs", cfg.max_epochs},
          {"patience", cfg.patience},
          {"val_fraction", cfg.val_fraction},
          {"loss", loss_name(cfg.loss)},
          {"focal_gamma", cfg.focal_gamma},
          {"baseline_weight", cfg.baseline_weight},
          {"seed", cfg.seed}};
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = to_json(cfg.train);
  j.erase("seed");
  j["seeds"] = cfg.seeds;
  j["dataset"] = cfg.dataset;
  j["out"] = cfg.out;
  j["synth"] = to_json(cfg.synth);
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return experiment_config_from_json(j);
}

}  // namespace atnm
