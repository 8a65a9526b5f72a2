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

#include "atnm/nn/conv.hpp"

#include <algorithm>

#include "atnm/error.hpp"
#include "atnm/simd/kernels.hpp"

namespace atnm {

Conv2dRect::Conv2dRect(std::string name, std::size_t maps, std::size_t kernel_h, std::size_t kernel_w)
    : kernels(name + ".kernels", {maps, 1, kernel_h, kernel_w}), bias(name + ".bias", {maps}) {}

Conv2dRect::Conv2dRect(std::string name, std::size_t maps, std::size_t kernel_h, std::size_t kernel_w, Rng& rng)
    : Conv2dRect(std::move(name), maps, kernel_h, kernel_w) {
  glorot_uniform(kernels, kernel_h * kernel_w, maps * kernel_h * kernel_w, rng);
}

void Conv2dRect::check_input(const Tensor& x) const {
  if (x.rank() != 4 || x.dim(1) != 1) {
    throw DimensionError("conv '" + kernels.name + "': expected [B x 1 x H x W] input, got " +
                         shape_string(x.shape()));
  }
  if (kernel_h() > x.dim(2) || kernel_w() > x.dim(3)) {
    throw DimensionError("conv '" + kernels.name + "': kernel " + shape_string(kernels.value.shape()) +
                         " larger than input " + shape_string(x.shape()));
  }
}

Tensor Conv2dRect::forward(const Tensor& x) const {
  check_input(x);
  const std::size_t B = x.dim(0), H = x.dim(2), W = x.dim(3);
  const std::size_t K = maps(), kh = kernel_h(), kw = kernel_w();
  const std::size_t Ho = H - kh + 1, Wo = W - kw + 1;
  const auto& k = simd::kernels();
  Tensor y({B, K, Ho, Wo});
  for (std::size_t b = 0; b < B; ++b) {
    const double* xb = x.data() + b * H * W;
    for (std::size_t m = 0; m < K; ++m) {
      const double* w = kernels.value.data() + m * kh * kw;
      double* ym = y.data() + (b * K + m) * Ho * Wo;
      for (std::size_t i = 0; i < Ho; ++i) {
        for (std::size_t j = 0; j < Wo; ++j) {
          double acc = bias.value[m];
          for (std::size_t u = 0; u < kh; ++u) acc += k.dot(w + u * kw, xb + (i + u) * W + j, kw);
          ym[i * Wo + j] = acc;
        }
      }
    }
  }
  return y;
}

Tensor Conv2dRect::backward(const Tensor& x, const Tensor& dy) {
  check_input(x);
  const std::size_t B = x.dim(0), H = x.dim(2), W = x.dim(3);
  const std::size_t K = maps(), kh = kernel_h(), kw = kernel_w();
  const std::size_t Ho = H - kh + 1, Wo = W - kw + 1;
  require_shape(dy, {B, K, Ho, Wo}, "conv backward upstream");
  const auto& k = simd::kernels();
  Tensor dx(x.shape());
  for (std::size_t b = 0; b < B; ++b) {
    const double* xb = x.data() + b * H * W;
    double* dxb = dx.data() + b * H * W;
    for (std::size_t m = 0; m < K; ++m) {
      const double* w = kernels.value.data() + m * kh * kw;
      double* dw = kernels.grad.data() + m * kh * kw;
      const double* dym = dy.data() + (b * K + m) * Ho * Wo;
      for (std::size_t i = 0; i < Ho; ++i) {
        for (std::size_t j = 0; j < Wo; ++j) {
          const double g = dym[i * Wo + j];
          if (g == 0.0) continue;
          bias.grad[m] += g;
          for (std::size_t u = 0; u < kh; ++u) {
            k.axpy(g, xb + (i + u) * W + j, dw + u * kw, kw);
            k.axpy(g, w + u * kw, dxb + (i + u) * W + j, kw);
          }
        }
      }
    }
  }
  return dx;
}

Tensor global_max_pool(const Tensor& x, std::vector<std::size_t>* argmax) {
  if (x.rank() != 4) throw DimensionError("global_max_pool: expected rank-4 input, got " + shape_string(x.shape()));
  const std::size_t B = x.dim(0), K = x.dim(1), area = x.dim(2) * x.dim(3);
  Tensor y = Tensor::matrix(B, K);
  if (argmax != nullptr) argmax->assign(B * K, 0);
  for (std::size_t bk = 0; bk < B * K; ++bk) {
    const double* map = x.data() + bk * area;
    const std::size_t best = static_cast<std::size_t>(std::max_element(map, map + area) - map);
    y[bk] = map[best];
    if (argmax != nullptr) (*argmax)[bk] = bk * area + best;
  }
  return y;
}

Tensor global_max_pool_backward(const std::vector<std::size_t>& input_shape,
                                const std::vector<std::size_t>& argmax, const Tensor& dy) {
  Tensor dx(input_shape);
  if (dy.size() != argmax.size()) {
    throw DimensionError("global_max_pool backward: " + std::to_string(dy.size()) + " gradients for " +
                         std::to_string(argmax.size()) + " maps");
  }
  for (std::size_t i = 0; i < argmax.size(); ++i) dx[argmax[i]] += dy[i];
  return dx;
}

}  // namespace atnm
