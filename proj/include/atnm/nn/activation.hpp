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

#include <string_view>

#include "atnm/nn/tensor.hpp"

namespace atnm {

enum class Activation { Relu, Sigmoid, Tanh };

double sigmoid(double x);

Tensor activate(const Tensor& x, Activation kind);
/// Upstream gradient pulled back through the activation, expressed in terms
/// of the forward *output* y (valid for all three kinds).
Tensor activate_backward(const Tensor& y, const Tensor& dy, Activation kind);

Activation parse_activation(std::string_view name);

}  // namespace atnm
