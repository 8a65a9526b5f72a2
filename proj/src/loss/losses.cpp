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

#include "atnm/loss/losses.hpp"

#include <algorithm>
#include <cmath>

#include "atnm/error.hpp"

namespace atnm {

LossKind parse_loss(std::string_view name) {
  if (name == "bce") return LossKind::Bce;
  if (name == "focal") return LossKind::Focal;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected bce|focal)");
}

std::string_view loss_name(LossKind kind) { return kind == LossKind::Bce ? "bce" : "focal"; }

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known) {
  if (pred.size() != label.size() || pred.size() != known.size()) {
    throw DimensionError("loss inputs disagree: " + std::to_string(pred.size()) + " predictions, " +
                         std::to_string(label.size()) + " labels, " + std::to_string(known.size()) + " mask entries");
  }
}

std::size_t known_or_throw(std::span<const std::uint8_t> known) {
  const auto n = static_cast<std::size_t>(std::count_if(known.begin(), known.end(), [](auto k) { return k != 0; }));
  if (n == 0) throw LossError("no known labels; the example must be skipped");
  return n;
}

bool clamped(double p) { return p < kPredEps || p > 1.0 - kPredEps; }
double clamp_pred(double p) { return std::clamp(p, kPredEps, 1.0 - kPredEps); }

template <bool WithGrad>
LossValue bce_impl(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known) {
  check_lengths(pred, label, known);
  const double inv = 1.0 / static_cast<double>(known_or_throw(known));
  LossValue out;
  if constexpr (WithGrad) out.grad.assign(pred.size(), 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (!known[c]) continue;
    const double p = clamp_pred(pred[c]);
    const double y = label[c];
    sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    if constexpr (WithGrad) {
      if (!clamped(pred[c])) out.grad[c] = inv * (-(y / p) + (1.0 - y) / (1.0 - p));
    }
  }
  out.value = sum * inv;
  return out;
}

double weight_of(std::span<const double> weights, std::size_t c) { return weights.empty() ? 1.0 : weights[c]; }

template <bool WithGrad>
LossValue focal_impl(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known,
                     double gamma, std::span<const double> weights) {
  check_lengths(pred, label, known);
  if (!weights.empty() && weights.size() != pred.size()) {
    throw DimensionError("focal loss: " + std::to_string(weights.size()) + " class weights for " +
                         std::to_string(pred.size()) + " classes");
  }
  const double inv = 1.0 / static_cast<double>(known_or_throw(known));
  LossValue out;
  if constexpr (WithGrad) out.grad.assign(pred.size(), 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (!known[c]) continue;
    const double q = clamp_pred(pred[c]);
    const bool positive = label[c] >= 0.5;
    const double p = positive ? q : 1.0 - q;
    const double w = weight_of(weights, c);
    const double modulator = std::pow(1.0 - p, gamma);
    sum += -w * modulator * std::log(p);
    if constexpr (WithGrad) {
      if (!clamped(pred[c])) {
        // d/dp of -(1-p)^g log p
        const double dmod = gamma == 0.0 ? 0.0 : gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p);
        const double dp = w * (dmod - modulator / p);
        out.grad[c] = inv * (positive ? dp : -dp);
      }
    }
  }
  out.value = sum * inv;
  return out;
}

}  // namespace

double partial_bce(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known) {
  return bce_impl<false>(pred, label, known).value;
}

LossValue partial_bce_grad(std::span<const double> pred, std::span<const double> label,
                           std::span<const std::uint8_t> known) {
  return bce_impl<true>(pred, label, known);
}

double partial_focal(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known,
                     double gamma, std::span<const double> weights) {
  return focal_impl<false>(pred, label, known, gamma, weights).value;
}

LossValue partial_focal_grad(std::span<const double> pred, std::span<const double> label,
                             std::span<const std::uint8_t> known, double gamma, std::span<const double> weights) {
  return focal_impl<true>(pred, label, known, gamma, weights);
}

std::vector<double> class_weights(std::span<const LabeledExample> examples, std::size_t classes) {
  std::vector<double> counts(classes, 0.0);
  for (const auto& ex : examples) {
    if (ex.classes() != classes) throw DimensionError("example '" + ex.id + "' has the wrong number of labels");
    for (std::size_t c = 0; c < classes; ++c) {
      if (ex.state(c) == LabelState::Positive) counts[c] += 1.0;
    }
  }
  std::vector<double> w(classes);
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    w[c] = 1.0 / std::max(counts[c], 1.0);
    total += w[c];
  }
  for (double& v : w) v *= static_cast<double>(classes) / total;
  return w;
}

LossValue classification_loss(const Objective& objective, std::span<const double> pred, std::span<const double> label,
                              std::span<const std::uint8_t> known) {
  if (objective.kind == LossKind::Bce) return partial_bce_grad(pred, label, known);
  return partial_focal_grad(pred, label, known, objective.gamma, objective.weights);
}

double step_reward(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known,
                   double threshold) {
  check_lengths(pred, label, known);
  std::size_t total = 0, correct = 0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (!known[c]) continue;
    ++total;
    if ((pred[c] >= threshold) == (label[c] >= 0.5)) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<double> cumulative_rewards(std::span<const double> rewards) {
  std::vector<double> out(rewards.size());
  double running = 0.0;
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    running += rewards[j];
    out[j] = running;
  }
  return out;
}

HybridLoss hybrid_loss(std::span<const double> final_pred, std::span<const double> rewards,
                       std::span<const double> cumulative, std::span<const double> logprobs,
                       std::span<const double> baselines, std::span<const double> label,
                       std::span<const std::uint8_t> known, const Objective& objective) {
  const std::size_t J = cumulative.size();
  if (rewards.size() != J || logprobs.size() != J || baselines.size() != J) {
    throw DimensionError("hybrid loss: trajectory of " + std::to_string(J) + " steps with " +
                         std::to_string(rewards.size()) + " rewards, " + std::to_string(logprobs.size()) +
                         " log-probabilities and " + std::to_string(baselines.size()) + " baselines");
  }
  HybridLoss out;
  LossValue cls = classification_loss(objective, final_pred, label, known);
  out.classification = cls.value;
  out.d_final_pred = std::move(cls.grad);
  out.d_logprob.resize(J);
  out.d_baseline.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double advantage = cumulative[j] - baselines[j];
    out.policy += -advantage * logprobs[j];
    out.baseline += objective.baseline_weight * advantage * advantage;
    out.d_logprob[j] = -advantage;
    out.d_baseline[j] = 2.0 * objective.baseline_weight * (baselines[j] - cumulative[j]);
    out.mean_reward += rewards[j];
    out.mean_advantage += advantage;
    out.baseline_mse += advantage * advantage;
  }
  if (J > 0) {
    out.mean_reward /= static_cast<double>(J);
    out.mean_advantage /= static_cast<double>(J);
    out.baseline_mse /= static_cast<double>(J);
  }
  out.total = out.classification + out.policy + out.baseline;
  return out;
}

}  // namespace atnm
