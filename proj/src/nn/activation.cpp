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

#include "atnm/nn/activation.hpp"

#include <cmath>
#include <string>

#include "atnm/error.hpp"

namespace atnm {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor activate(const Tensor& x, Activation kind) {
  Tensor y = x;
  for (double& v : y.values()) {
    switch (kind) {
      case Activation::Relu: v = v > 0.0 ? v : 0.0; break;
      case Activation::Sigmoid: v = sigmoid(v); break;
      case Activation::Tanh: v = std::tanh(v); break;
    }
  }
  return y;
}

Tensor activate_backward(const Tensor& y, const Tensor& dy, Activation kind) {
  if (y.shape() != dy.shape()) {
    throw DimensionError("activation backward: output " + shape_string(y.shape()) + " vs upstream " +
                         shape_string(dy.shape()));
  }
  Tensor dx(dy.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double out = y[i];
    switch (kind) {
      case Activation::Relu: dx[i] = out > 0.0 ? dy[i] : 0.0; break;
      case Activation::Sigmoid: dx[i] = dy[i] * out * (1.0 - out); break;
      case Activation::Tanh: dx[i] = dy[i] * (1.0 - out * out); break;
    }
  }
  return dx;
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

}  // namespace atnm
