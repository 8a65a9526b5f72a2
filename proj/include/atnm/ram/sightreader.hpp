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
#include <optional>
#include <vector>

#include <json.hpp>

#include "atnm/model.hpp"
#include "atnm/nn/recurrent.hpp"
#include "atnm/ram/glimpse.hpp"

namespace atnm {

/// log N(sample; mean, sigma^2 I) in two dimensions.
double location_logprob(const Location& sample, const Location& mean, double sigma);

struct LocationSample {
  Location mean;      // mu
  Location sample;    // z ~ N(mu, sigma^2 I), before clamping
  Location location;  // clamp(z, -1, 1)
  double logprob = 0.0;  // at the pre-clamp sample
};

/// Draws the next glimpse location around `mean`. Throws ConfigError for
/// sigma <= 0.
LocationSample sample_location(const Location& mean, double sigma, Rng& rng);

/// mu = tanh(h W + b): the location policy mean. Trained only through the
/// policy term; the hidden state is treated as a constant input.
class LocationNetwork {
 public:
  LocationNetwork() = default;
  LocationNetwork(std::size_t hidden, Rng& rng) : fc("location.fc", hidden, 2, rng) {}

  Location mean(const Tensor& h) const;
  LocationSample step(const Tensor& h, double sigma, Rng& rng) const;
  /// Accumulates d(coef * logprob)/d(params) for a recorded sample.
  void backward_logprob(const Tensor& h, const LocationSample& s, double sigma, double coef);
  void collect(ParamList& out) { fc.collect(out); }

  Linear fc;
};

/// Preliminary prediction sigmoid(h W + b) in [0,1]^C.
class StepClassifier {
 public:
  StepClassifier() = default;
  StepClassifier(std::size_t hidden, std::size_t classes, Rng& rng) : fc("classifier.fc", hidden, classes, rng) {}

  std::vector<double> forward(const Tensor& h) const;
  /// Returns dL/dh.
  Tensor backward(const Tensor& h, std::span<const double> pred, std::span<const double> d_pred);
  void collect(ParamList& out) { fc.collect(out); }

  Linear fc;
};

struct TrajectoryStep {
  Location location;  // where glimpse j looked
  Location mean;      // policy mean it was drawn from (equals location for step 1)
  Location sample;    // pre-clamp draw (equals location for step 1)
  double logprob = 0.0;  // 0 for step 1, whose location is not drawn by the policy
  Tensor hidden;
  std::vector<double> pred;
  double reward = 0.0;
  double cumulative_reward = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;

  std::size_t length() const { return steps.size(); }
  const std::vector<double>& final_prediction() const { return steps.back().pred; }
};

/// Fills r_j (mean accuracy over known labels) and R_j = r_1 + ... + r_j.
void assign_rewards(Trajectory& trajectory, std::span<const double> label, std::span<const std::uint8_t> known);

/// JSON array of {step, mu, loc, reward, cumulative_reward, pred}.
nlohmann::json trajectory_json(const Trajectory& trajectory);

/// Sightreader (multi-scale glimpses, rect-conv encoder, GRU) and the RAM
/// baselines (single 12x12 glimpse, flat encoder, RNN or GRU core).
class Sightreader final : public Model {
 public:
  struct StepCache {
    GlimpseNetwork::Cache glimpse;
    RecurrentCache core;
  };
  struct Episode {
    Trajectory trajectory;
    std::vector<StepCache> caches;
  };

  Sightreader(ModelConfig cfg, Rng& rng);

  const ModelConfig& config() const override { return cfg_; }
  ParamList parameters() override;
  bool stochastic() const override { return true; }
  std::vector<double> predict(const Spectrogram& x, Rng& rng) const override;
  ExampleStats accumulate(const LabeledExample& example, const Objective& objective, double scale, Rng& rng) override;

  /// h_0 = 0; each step glimpses, updates the core, predicts, and (except at
  /// the last step) samples the next location. Without `initial`, the first
  /// location is uniform on [-1,1]^2.
  Episode run_episode(const Spectrogram& x, Rng& rng, std::optional<Location> initial = std::nullopt) const;

  /// Deterministic re-run along given pre-clamp locations (one per step):
  /// policy means and log-densities are recomputed, nothing is sampled.
  Episode replay_episode(const Spectrogram& x, std::span<const Location> locations) const;

  /// Backpropagates the classification gradient on the final prediction
  /// through the unrolled core, the policy coefficients d/dlogprob_j into
  /// the location network, and the baseline gradients.
  void backward(const Episode& episode, std::span<const double> d_final_pred, std::span<const double> d_logprob,
                std::span<const double> d_baseline);

  const std::vector<PatchSize>& glimpse_sizes() const { return cfg_.glimpse_sizes; }

  GlimpseNetwork glimpse;
  std::unique_ptr<RecurrentCell> core;
  LocationNetwork location;
  StepClassifier classifier;
  Parameter baselines;  // one learned scalar per step

 private:
  Episode unroll(const Spectrogram& x, Location initial, Rng* rng, std::span<const Location> forced) const;

  ModelConfig cfg_;
};

}  // namespace atnm
