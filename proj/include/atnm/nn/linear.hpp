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

#include <string>

#include "atnm/nn/parameter.hpp"

namespace atnm {

enum class Bias { With, Without };

/// y = xW + b over the rows of x. Weight is [in x out], bias is [out].
class Linear {
 public:
  Linear() = default;
  Linear(std::string name, std::size_t in, std::size_t out, Bias bias = Bias::With);
  Linear(std::string name, std::size_t in, std::size_t out, Rng& rng, Bias bias = Bias::With);

  Tensor forward(const Tensor& x) const;
  /// Accumulates dW += x^T dy and db += sum(dy); returns dy W^T, or an empty
  /// tensor when `want_input_grad` is false.
  Tensor backward(const Tensor& x, const Tensor& dy, bool want_input_grad = true);

  void collect(ParamList& out) {
    out.push_back(&weight);
    if (has_bias()) out.push_back(&bias);
  }
  bool has_bias() const { return !bias.value.empty(); }
  std::size_t in_features() const { return weight.value.dim(0); }
  std::size_t out_features() const { return weight.value.dim(1); }

  Parameter weight;
  Parameter bias;  // empty when constructed with Bias::Without
};

}  // namespace atnm
