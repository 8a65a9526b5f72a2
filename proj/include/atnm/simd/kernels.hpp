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

#include <cstddef>
#include <string_view>

namespace atnm::simd {

enum class Isa { Scalar, Avx2 };

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

/// Function table for the arithmetic inner loops. Every entry has a scalar
/// reference implementation; vector variants must agree with it (exactly for
/// adam_update, to rounding for the reductions).
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += x
  void (*add)(const double* x, double* y, std::size_t n);
  // m, v and value updated in place from grad; no weight decay here.
  void (*adam_update)(const AdamCoefficients& c, const double* grad, double* m, double* v,
                      double* value, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the build or the host CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Kernels in use. Picked once from the CPU features, overridable with the
/// ATNM_ISA environment variable (scalar|avx2) or set_active_isa().
const KernelTable& kernels();
bool isa_available(Isa isa);
void set_active_isa(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);

}  // namespace atnm::simd
