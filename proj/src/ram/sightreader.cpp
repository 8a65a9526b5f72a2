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

#include "atnm/ram/sightreader.hpp"

#include <cmath>
#include <numbers>

#include "atnm/error.hpp"
#include "atnm/nn/activation.hpp"

namespace atnm {

double location_logprob(const Location& sample, const Location& mean, double sigma) {
  const double dt = sample.time - mean.time;
  const double df = sample.freq - mean.freq;
  return -(dt * dt + df * df) / (2.0 * sigma * sigma) - std::log(2.0 * std::numbers::pi * sigma * sigma);
}

LocationSample sample_location(const Location& mean, double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw ConfigError("location sigma must be positive");
  std::normal_distribution<double> noise(0.0, 1.0);
  LocationSample s;
  s.mean = mean;
  s.sample.time = mean.time + sigma * noise(rng);
  s.sample.freq = mean.freq + sigma * noise(rng);
  s.location = s.sample.clamped();
  s.logprob = location_logprob(s.sample, mean, sigma);
  return s;
}

Location LocationNetwork::mean(const Tensor& h) const {
  const Tensor mu = activate(fc.forward(h), Activation::Tanh);
  return {mu[0], mu[1]};
}

LocationSample LocationNetwork::step(const Tensor& h, double sigma, Rng& rng) const {
  return sample_location(mean(h), sigma, rng);
}

void LocationNetwork::backward_logprob(const Tensor& h, const LocationSample& s, double sigma, double coef) {
  if (coef == 0.0) return;
  const double inv_var = 1.0 / (sigma * sigma);
  const Tensor mu = Tensor::row({s.mean.time, s.mean.freq});
  const Tensor d_mu = Tensor::row({coef * (s.sample.time - s.mean.time) * inv_var,
                                   coef * (s.sample.freq - s.mean.freq) * inv_var});
  fc.backward(h, activate_backward(mu, d_mu, Activation::Tanh), false);
}

std::vector<double> StepClassifier::forward(const Tensor& h) const {
  return activate(fc.forward(h), Activation::Sigmoid).storage();
}

Tensor StepClassifier::backward(const Tensor& h, std::span<const double> pred, std::span<const double> d_pred) {
  const Tensor y = Tensor::row({pred.begin(), pred.end()});
  const Tensor dy = Tensor::row({d_pred.begin(), d_pred.end()});
  return fc.backward(h, activate_backward(y, dy, Activation::Sigmoid));
}

void assign_rewards(Trajectory& trajectory, std::span<const double> label, std::span<const std::uint8_t> known) {
  double running = 0.0;
  for (auto& step : trajectory.steps) {
    step.reward = step_reward(step.pred, label, known);
    running += step.reward;
    step.cumulative_reward = running;
  }
}

nlohmann::json trajectory_json(const Trajectory& trajectory) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t j = 0; j < trajectory.steps.size(); ++j) {
    const auto& s = trajectory.steps[j];
    out.push_back({{"step", j + 1},
                   {"mu", {s.mean.time, s.mean.freq}},
                   {"loc", {s.location.time, s.location.freq}},
                   {"reward", s.reward},
                   {"cumulative_reward", s.cumulative_reward},
                   {"pred", s.pred}});
  }
  return out;
}

Sightreader::Sightreader(ModelConfig cfg, Rng& rng) : cfg_(resolve_model_config(std::move(cfg))) {
  if (!is_ram_variant(cfg_.variant)) throw ConfigError("'" + cfg_.variant + "' is not a Sightreader/RAM variant");
  glimpse = GlimpseNetwork(parse_encoder(cfg_.encoder), cfg_.glimpse_sizes.size(), cfg_.glimpse_sizes.front(),
                           cfg_.conv_maps, cfg_.glimpse_features, rng);
  core = make_cell(parse_core(cfg_.core), "core", cfg_.glimpse_features, cfg_.hidden, rng);
  location = LocationNetwork(cfg_.hidden, rng);
  classifier = StepClassifier(cfg_.hidden, cfg_.classes, rng);
  baselines = Parameter("baselines", {cfg_.glimpses});
}

ParamList Sightreader::parameters() {
  ParamList out;
  glimpse.collect(out);
  core->collect(out);
  location.collect(out);
  classifier.collect(out);
  out.push_back(&baselines);
  return out;
}

Sightreader::Episode Sightreader::run_episode(const Spectrogram& x, Rng& rng, std::optional<Location> initial) const {
  if (!initial) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const double t = uniform(rng);
    const double f = uniform(rng);
    initial = Location{t, f};
  }
  return unroll(x, *initial, &rng, {});
}

Sightreader::Episode Sightreader::replay_episode(const Spectrogram& x, std::span<const Location> locations) const {
  if (locations.size() != cfg_.glimpses) {
    throw DimensionError("replay needs " + std::to_string(cfg_.glimpses) + " locations, got " +
                         std::to_string(locations.size()));
  }
  return unroll(x, locations.front(), nullptr, locations);
}

Sightreader::Episode Sightreader::unroll(const Spectrogram& x, Location initial, Rng* rng,
                                         std::span<const Location> forced) const {
  if (x.frames != cfg_.frames || x.bins != cfg_.bins) {
    throw DimensionError("model expects " + std::to_string(cfg_.frames) + "x" + std::to_string(cfg_.bins) +
                         " spectrograms, got " + std::to_string(x.frames) + "x" + std::to_string(x.bins));
  }
  const std::size_t J = cfg_.glimpses;
  Episode ep;
  ep.trajectory.steps.resize(J);
  ep.caches.resize(J);
  TrajectoryStep& first = ep.trajectory.steps.front();
  first.location = first.mean = first.sample = initial.clamped();

  Tensor h = Tensor::matrix(1, cfg_.hidden);
  for (std::size_t j = 0; j < J; ++j) {
    TrajectoryStep& step = ep.trajectory.steps[j];
    const GlimpsePatchSet patches = glimpse_extract(x, step.location, cfg_.glimpse_sizes);
    const Tensor rho = glimpse.forward(patches, step.location, &ep.caches[j].glimpse);
    h = core->forward(h, rho, &ep.caches[j].core);
    step.hidden = h;
    step.pred = classifier.forward(h);
    if (j + 1 < J) {
      LocationSample next;
      if (rng) {
        next = location.step(h, cfg_.sigma, *rng);
      } else {
        next.mean = location.mean(h);
        next.sample = forced[j + 1];
        next.location = forced[j + 1].clamped();
        next.logprob = location_logprob(next.sample, next.mean, cfg_.sigma);
      }
      TrajectoryStep& following = ep.trajectory.steps[j + 1];
      following.location = next.location;
      following.mean = next.mean;
      following.sample = next.sample;
      following.logprob = next.logprob;
    }
  }
  return ep;
}

void Sightreader::backward(const Episode& ep, std::span<const double> d_final_pred, std::span<const double> d_logprob,
                           std::span<const double> d_baseline) {
  const auto& steps = ep.trajectory.steps;
  const std::size_t J = steps.size();
  if (d_logprob.size() != J || d_baseline.size() != J || baselines.value.size() != J) {
    throw DimensionError("sightreader backward: episode of " + std::to_string(J) + " steps, " +
                         std::to_string(d_logprob.size()) + " policy coefficients, " +
                         std::to_string(d_baseline.size()) + " baseline gradients, " +
                         std::to_string(baselines.value.size()) + " baselines");
  }
  for (std::size_t j = 1; j < J; ++j) {
    const LocationSample s{steps[j].mean, steps[j].sample, steps[j].location, steps[j].logprob};
    location.backward_logprob(steps[j - 1].hidden, s, cfg_.sigma, d_logprob[j]);
  }
  for (std::size_t j = 0; j < J; ++j) baselines.grad[j] += d_baseline[j];

  Tensor dh = classifier.backward(steps.back().hidden, steps.back().pred, d_final_pred);
  for (std::size_t j = J; j-- > 0;) {
    auto [dh_prev, drho] = core->backward(ep.caches[j].core, dh);
    glimpse.backward(ep.caches[j].glimpse, drho);
    dh = std::move(dh_prev);
  }
}

std::vector<double> Sightreader::predict(const Spectrogram& x, Rng& rng) const {
  return run_episode(x, rng).trajectory.final_prediction();
}

ExampleStats Sightreader::accumulate(const LabeledExample& example, const Objective& objective, double scale,
                                     Rng& rng) {
  Episode ep = run_episode(example.spectrogram, rng);
  assign_rewards(ep.trajectory, example.labels, example.known);
  const std::size_t J = ep.trajectory.length();
  std::vector<double> rewards(J), cumulative(J), logprobs(J);
  for (std::size_t j = 0; j < J; ++j) {
    rewards[j] = ep.trajectory.steps[j].reward;
    cumulative[j] = ep.trajectory.steps[j].cumulative_reward;
    logprobs[j] = ep.trajectory.steps[j].logprob;
  }
  HybridLoss loss = hybrid_loss(ep.trajectory.final_prediction(), rewards, cumulative, logprobs,
                                baselines.value.storage(), example.labels, example.known, objective);
  for (double& g : loss.d_final_pred) g *= scale;
  for (double& g : loss.d_logprob) g *= scale;
  for (double& g : loss.d_baseline) g *= scale;
  backward(ep, loss.d_final_pred, loss.d_logprob, loss.d_baseline);
  return {loss.total, loss.classification, loss.mean_reward, loss.mean_advantage, loss.baseline_mse};
}

}  // namespace atnm
