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
#include <vector>

#include "atnm/nn/parameter.hpp"

namespace atnm {

/// Single-input-channel 2-D cross-correlation with rectangular kernels,
/// valid padding, stride 1. Kernels are [K x 1 x kh x kw], bias is [K].
class Conv2dRect {
 public:
  Conv2dRect() = default;
  Conv2dRect(std::string name, std::size_t maps, std::size_t kernel_h, std::size_t kernel_w);
  Conv2dRect(std::string name, std::size_t maps, std::size_t kernel_h, std::size_t kernel_w, Rng& rng);

  /// x [B x 1 x H x W] -> [B x K x (H-kh+1) x (W-kw+1)].
  Tensor forward(const Tensor& x) const;
  /// Accumulates kernel/bias gradients and returns dL/dx.
  Tensor backward(const Tensor& x, const Tensor& dy);

  void collect(ParamList& out) { out.push_back(&kernels); out.push_back(&bias); }
  std::size_t maps() const { return kernels.value.dim(0); }
  std::size_t kernel_h() const { return kernels.value.dim(2); }
  std::size_t kernel_w() const { return kernels.value.dim(3); }

  Parameter kernels;
  Parameter bias;

 private:
  void check_input(const Tensor& x) const;
};

/// Max over each feature map: [B x K x H x W] -> [B x K]. `argmax` receives the
/// flat offset of the winning cell for each (b, k).
Tensor global_max_pool(const Tensor& x, std::vector<std::size_t>* argmax);
Tensor global_max_pool_backward(const std::vector<std::size_t>& input_shape,
                                const std::vector<std::size_t>& argmax, const Tensor& dy);

}  // namespace atnm
