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

#include "atnm/nn/adam.hpp"

#include <cmath>

#include "atnm/error.hpp"
#include "atnm/simd/kernels.hpp"

namespace atnm {

Adam::Adam(AdamConfig config, ParamList params) : config_(config), params_(std::move(params)) {
  if (!(config_.lr >= 0.0) || !(config_.eps > 0.0) || config_.beta1 < 0.0 || config_.beta1 >= 1.0 ||
      config_.beta2 < 0.0 || config_.beta2 >= 1.0 || config_.weight_decay < 0.0) {
    throw ConfigError("invalid Adam hyperparameters");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    if (p->grad.shape() != p->value.shape()) {
      throw DimensionError("parameter '" + p->name + "' gradient shape " + shape_string(p->grad.shape()) +
                           " differs from value shape " + shape_string(p->value.shape()));
    }
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step() {
  for (const Parameter* p : params_) {
    if (!p->grad.all_finite()) throw TrainingError("non-finite gradient in parameter '" + p->name + "'");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const simd::AdamCoefficients c{config_.lr,
                                 config_.beta1,
                                 config_.beta2,
                                 config_.eps,
                                 1.0 - std::pow(config_.beta1, t),
                                 1.0 - std::pow(config_.beta2, t)};
  const auto& k = simd::kernels();
  const double decay = 1.0 - config_.lr * config_.weight_decay;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    if (config_.weight_decay != 0.0) {
      for (double& v : p.value.values()) v *= decay;
    }
    k.adam_update(c, p.grad.data(), m_[i].data(), v_[i].data(), p.value.data(), p.value.size());
    p.zero_grad();
  }
}

}  // namespace atnm
