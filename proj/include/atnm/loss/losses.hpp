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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atnm/features/spectrogram.hpp"

namespace atnm {

enum class LossKind { Bce, Focal };

LossKind parse_loss(std::string_view name);
std::string_view loss_name(LossKind kind);

/// Predictions are clamped to [kPredEps, 1 - kPredEps] before taking logs.
inline constexpr double kPredEps = 1e-7;

struct LossValue {
  double value = 0.0;
  std::vector<double> grad;  // d value / d pred; zero outside the mask
};

/// Mean over known classes of -[y log p + (1-y) log(1-p)]. Throws LossError
/// for an empty mask.
double partial_bce(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known);
LossValue partial_bce_grad(std::span<const double> pred, std::span<const double> label,
                           std::span<const std::uint8_t> known);

/// Mean over known classes of -w_c (1 - p_c)^gamma log p_c with
/// p_c = pred if y = 1 else 1 - pred. Empty `weights` means all ones.
double partial_focal(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known,
                     double gamma, std::span<const double> weights);
LossValue partial_focal_grad(std::span<const double> pred, std::span<const double> label,
                             std::span<const std::uint8_t> known, double gamma, std::span<const double> weights);

/// Inverse positive frequency among known labels, scaled to mean 1. Classes
/// with no known positive are counted as having one.
std::vector<double> class_weights(std::span<const LabeledExample> examples, std::size_t classes);

/// Classification objective shared by both model families.
struct Objective {
  LossKind kind = LossKind::Bce;
  double gamma = 2.0;
  std::vector<double> weights;  // focal balancing; empty means unit weights
  double baseline_weight = 1.0;  // lambda_b in the hybrid loss
};

LossValue classification_loss(const Objective& objective, std::span<const double> pred, std::span<const double> label,
                              std::span<const std::uint8_t> known);

/// Fraction of known classes where (pred >= threshold) matches the label;
/// 0 for an empty mask.
double step_reward(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known,
                   double threshold = 0.5);

/// R_j = r_1 + ... + r_j.
std::vector<double> cumulative_rewards(std::span<const double> rewards);

struct HybridLoss {
  double total = 0.0;
  double classification = 0.0;
  double policy = 0.0;    // -sum_j (R_j - b_j) * logprob_j
  double baseline = 0.0;  // lambda_b * sum_j (b_j - R_j)^2
  std::vector<double> d_final_pred;
  std::vector<double> d_logprob;  // -(R_j - b_j); advantage held constant
  std::vector<double> d_baseline;  // 2 lambda_b (b_j - R_j)
  double mean_reward = 0.0;
  double mean_advantage = 0.0;
  double baseline_mse = 0.0;
};

/// Classification loss on the last-step prediction plus the REINFORCE term
/// with learned per-step baselines. Cumulative rewards are constants.
HybridLoss hybrid_loss(std::span<const double> final_pred, std::span<const double> rewards,
                       std::span<const double> cumulative, std::span<const double> logprobs,
                       std::span<const double> baselines, std::span<const double> label,
                       std::span<const std::uint8_t> known, const Objective& objective);

}  // namespace atnm
