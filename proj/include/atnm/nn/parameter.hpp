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
#include <random>
#include <string>
#include <vector>

#include "atnm/nn/tensor.hpp"

namespace atnm {

using Rng = std::mt19937_64;

struct Parameter {
  Parameter() = default;
  Parameter(std::string name, std::vector<std::size_t> shape)
      : name(std::move(name)), value(shape), grad(std::move(shape)) {}

  void zero_grad() { grad.fill(0.0); }

  std::string name;
  Tensor value;
  Tensor grad;
};

/// Borrowed views of a model's parameters, in registration order.
using ParamList = std::vector<Parameter*>;

void zero_grads(const ParamList& params);

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Throws ConfigError on duplicate names.
void check_unique_names(const ParamList& params);

}  // namespace atnm
