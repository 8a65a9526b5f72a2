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

#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "atnm/error.hpp"
#include "atnm/simd/kernels.hpp"

using namespace atnm;
using namespace atnm::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Reference loops written independently of the kernel sources.
double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar kernels agree with plain loops") {
    std::mt19937_64 rng(1);
    const KernelTable& k = scalar_kernels();
    CHECK(k.isa == Isa::Scalar);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      CHECK(k.dot(a.data(), b.data(), n) == doctest::Approx(naive_dot(a, b)).epsilon(1e-13));
      auto y = b;
      k.axpy(0.25, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.25 * a[i]);
      y = b;
      k.add(a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + a[i]);
    }
  }

  TEST_CASE("avx2 kernels match the scalar reference") {
    const KernelTable* avx = avx2_kernels();
    if (avx == nullptr) {
      MESSAGE("AVX2 not available on this host; skipping");
      return;
    }
    const KernelTable& ref = scalar_kernels();
    std::mt19937_64 rng(2);
    for (std::size_t n = 0; n < 70; ++n) {
      const auto a = random_vector(n, rng, 10.0);
      const auto b = random_vector(n, rng, 10.0);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(avx->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * mag + 1e-300);

      auto y1 = b;
      auto y2 = b;
      avx->axpy(-1.75, a.data(), y1.data(), n);
      ref.axpy(-1.75, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y2[i]) + 17.5 * std::abs(a[i])));

      y1 = b;
      y2 = b;
      avx->add(a.data(), y1.data(), n);
      ref.add(a.data(), y2.data(), n);
      CHECK(y1 == y2);
    }
  }

  TEST_CASE("avx2 Adam update is bit-identical to scalar") {
    const KernelTable* avx = avx2_kernels();
    if (avx == nullptr) {
      MESSAGE("AVX2 not available on this host; skipping");
      return;
    }
    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 31u, 64u, 129u}) {
      const auto grad = random_vector(n, rng, 3.0);
      auto m = random_vector(n, rng, 0.1);
      auto v = random_vector(n, rng, 0.1);
      for (double& x : v) x = std::abs(x);
      auto value = random_vector(n, rng);
      auto m2 = m, v2 = v, value2 = value;
      const AdamCoefficients c{5e-4, 0.9, 0.999, 1e-8, 1.0 - std::pow(0.9, 7), 1.0 - std::pow(0.999, 7)};
      avx->adam_update(c, grad.data(), m.data(), v.data(), value.data(), n);
      scalar_kernels().adam_update(c, grad.data(), m2.data(), v2.data(), value2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::bit_cast<std::uint64_t>(m[i]) == std::bit_cast<std::uint64_t>(m2[i]));
        CHECK(std::bit_cast<std::uint64_t>(v[i]) == std::bit_cast<std::uint64_t>(v2[i]));
        CHECK(std::bit_cast<std::uint64_t>(value[i]) == std::bit_cast<std::uint64_t>(value2[i]));
      }
    }
  }

  TEST_CASE("dispatch honours explicit selection") {
    const Isa before = active_isa();
    set_active_isa(Isa::Scalar);
    CHECK(kernels().isa == Isa::Scalar);
    if (isa_available(Isa::Avx2)) {
      set_active_isa(Isa::Avx2);
      CHECK(kernels().isa == Isa::Avx2);
    } else {
      CHECK_THROWS_AS(set_active_isa(Isa::Avx2), ConfigError);
    }
    set_active_isa(before);
    CHECK(parse_isa("scalar") == Isa::Scalar);
    CHECK(parse_isa("avx2") == Isa::Avx2);
    CHECK_THROWS_AS(parse_isa("neon"), ConfigError);
    CHECK(isa_name(Isa::Avx2) == "avx2");
  }
}
