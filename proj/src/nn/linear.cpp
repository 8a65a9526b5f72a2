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

#include "atnm/nn/linear.hpp"

#include <algorithm>

#include "atnm/error.hpp"
#include "atnm/simd/kernels.hpp"

namespace atnm {

Linear::Linear(std::string name, std::size_t in, std::size_t out, Bias with_bias)
    : weight(name + ".weight", {in, out}) {
  if (with_bias == Bias::With) bias = Parameter(name + ".bias", {out});
}

Linear::Linear(std::string name, std::size_t in, std::size_t out, Rng& rng, Bias with_bias)
    : Linear(std::move(name), in, out, with_bias) {
  glorot_uniform(weight, in, out, rng);
}

Tensor Linear::forward(const Tensor& x) const {
  const std::size_t in = in_features();
  const std::size_t out = out_features();
  if (x.empty() || x.cols() != in) {
    throw DimensionError("linear '" + weight.name + "': input " + shape_string(x.shape()) +
                         " does not match weight " + shape_string(weight.value.shape()));
  }
  const auto& k = simd::kernels();
  Tensor y = Tensor::matrix(x.rows(), out);
  const double* w = weight.value.data();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double* yr = y.data() + r * out;
    if (has_bias()) std::copy(bias.value.data(), bias.value.data() + out, yr);
    const double* xr = x.data() + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      if (xr[i] != 0.0) k.axpy(xr[i], w + i * out, yr, out);
    }
  }
  return y;
}

Tensor Linear::backward(const Tensor& x, const Tensor& dy, bool want_input_grad) {
  const std::size_t in = in_features();
  const std::size_t out = out_features();
  if (x.cols() != in || dy.cols() != out || x.rows() != dy.rows()) {
    throw DimensionError("linear '" + weight.name + "' backward: input " + shape_string(x.shape()) +
                         ", upstream " + shape_string(dy.shape()) + ", weight " +
                         shape_string(weight.value.shape()));
  }
  const auto& k = simd::kernels();
  Tensor dx;
  if (want_input_grad) dx = Tensor(x.shape());
  const double* w = weight.value.data();
  double* dw = weight.grad.data();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.data() + r * in;
    const double* dyr = dy.data() + r * out;
    if (has_bias()) k.add(dyr, bias.grad.data(), out);
    for (std::size_t i = 0; i < in; ++i) {
      if (xr[i] != 0.0) k.axpy(xr[i], dyr, dw + i * out, out);
    }
    if (want_input_grad) {
      double* dxr = dx.data() + r * in;
      for (std::size_t i = 0; i < in; ++i) dxr[i] = k.dot(w + i * out, dyr, out);
    }
  }
  return dx;
}

}  // namespace atnm
