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

#include <atomic>
#include <cstdlib>
#include <string>

#include "atnm/error.hpp"
#include "atnm/simd/kernels.hpp"

namespace atnm::simd {

#if defined(ATNM_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(ATNM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) {
  if (isa == Isa::Scalar) return &scalar_kernels();
  return avx2_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{[] {
    const KernelTable* best = avx2_kernels() ? avx2_kernels() : &scalar_kernels();
    if (const char* env = std::getenv("ATNM_ISA"); env != nullptr && *env != '\0') {
      const KernelTable* requested = table_for(parse_isa(env));
      if (requested == nullptr) {
        throw ConfigError(std::string("ATNM_ISA=") + env + " is not supported on this host");
      }
      best = requested;
    }
    return best;
  }()};
  return slot;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(ATNM_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() { return *active_slot().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) { return table_for(isa) != nullptr; }

void set_active_isa(Isa isa) {
  const KernelTable* table = table_for(isa);
  if (table == nullptr) throw ConfigError("instruction set " + std::string(isa_name(isa)) + " unavailable");
  active_slot().store(table, std::memory_order_relaxed);
}

Isa active_isa() { return kernels().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::Scalar ? "scalar" : "avx2"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  throw ConfigError("unknown instruction set '" + std::string(name) + "' (expected scalar|avx2)");
}

}  // namespace atnm::simd
