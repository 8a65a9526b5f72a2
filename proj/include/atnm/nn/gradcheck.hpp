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
#include <functional>
#include <string>

#include "atnm/nn/parameter.hpp"

namespace atnm {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Tensors larger than this are subsampled to exactly this many coordinates.
  std::size_t coords_per_tensor = 64;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coords_checked = 0;
};

/// Evaluates the scalar loss. When `with_grad` is true it must also
/// accumulate analytic gradients into the parameters' grad tensors.
using LossFn = std::function<double(bool with_grad)>;

/// Central-difference check of every parameter in `params`. The relative
/// error of a coordinate is |a - n| / (|a| + |n| + 1e-12).
GradCheckReport finite_diff_check(const ParamList& params, const LossFn& loss, const GradCheckOptions& options = {});

}  // namespace atnm
