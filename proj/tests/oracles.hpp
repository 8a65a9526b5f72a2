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

// Direct re-statements of the model equations, written without reusing any
// library code paths, for cross-checking the implementations.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "atnm/features/spectrogram.hpp"
#include "atnm/mil/attention_mic.hpp"
#include "atnm/model.hpp"

namespace atnm::oracle {

inline long nearest_cell(double coord, std::size_t n) {
  const double c = coord < -1.0 ? -1.0 : (coord > 1.0 ? 1.0 : coord);
  const double pos = (c + 1.0) / 2.0 * static_cast<double>(n - 1);
  return static_cast<long>(std::floor(pos + 0.5));
}

/// [K][s1.frames][s1.bins] flattened; windows start at centre - size/2.
inline std::vector<double> glimpse(const Spectrogram& x, double lt, double lf, const std::vector<PatchSize>& sizes) {
  const long ct = nearest_cell(lt, x.frames);
  const long cf = nearest_cell(lf, x.bins);
  const PatchSize base = sizes.front();
  std::vector<double> out;
  for (const PatchSize s : sizes) {
    const long rt = static_cast<long>(s.frames / base.frames);
    const long rf = static_cast<long>(s.bins / base.bins);
    const long t0 = ct - static_cast<long>(s.frames) / 2;
    const long f0 = cf - static_cast<long>(s.bins) / 2;
    for (long a = 0; a < static_cast<long>(base.frames); ++a) {
      for (long b = 0; b < static_cast<long>(base.bins); ++b) {
        double sum = 0.0;
        for (long i = 0; i < rt; ++i) {
          for (long j = 0; j < rf; ++j) {
            const long t = t0 + a * rt + i;
            const long f = f0 + b * rf + j;
            const bool inside = t >= 0 && f >= 0 && t < static_cast<long>(x.frames) && f < static_cast<long>(x.bins);
            if (inside) sum += x.values[static_cast<std::size_t>(t) * x.bins + static_cast<std::size_t>(f)];
          }
        }
        out.push_back(rt * rf > 1 ? sum / static_cast<double>(rt * rf) : sum);
      }
    }
  }
  return out;
}

/// Final predictions from the attention equations, one class at a time.
inline std::vector<double> attention(const Tensor& v, const AttentionHead& head) {
  const std::size_t N = v.rows(), D = v.cols(), C = head.instance.out_features();
  std::vector<double> out(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<double> pred(N), raw(N);
    double total = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      double zi = head.instance.bias.value[c];
      double za = head.attention.bias.value[c];
      for (std::size_t d = 0; d < D; ++d) {
        zi += v.at(n, d) * head.instance.weight.value.at(d, c);
        za += v.at(n, d) * head.attention.weight.value.at(d, c);
      }
      pred[n] = 1.0 / (1.0 + std::exp(-zi));
      raw[n] = 1.0 / (1.0 + std::exp(-za));
      total += raw[n];
    }
    for (std::size_t n = 0; n < N; ++n) out[c] += raw[n] / total * pred[n];
  }
  return out;
}

inline double clamp_pred(double p) { return std::fmin(std::fmax(p, 1e-7), 1.0 - 1e-7); }

inline double bce(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known) {
  double total = 0.0;
  int n = 0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (!known[c]) continue;
    const double p = clamp_pred(pred[c]);
    total += -(label[c] * std::log(p) + (1.0 - label[c]) * std::log(1.0 - p));
    ++n;
  }
  return total / n;
}

inline double focal(std::span<const double> pred, std::span<const double> label, std::span<const std::uint8_t> known,
                    double gamma, std::span<const double> weights) {
  double total = 0.0;
  int n = 0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (!known[c]) continue;
    const double q = clamp_pred(pred[c]);
    const double p = label[c] == 1.0 ? q : 1.0 - q;
    const double w = weights.empty() ? 1.0 : weights[c];
    total += -w * std::pow(1.0 - p, gamma) * std::log(p);
    ++n;
  }
  return total / n;
}

}  // namespace atnm::oracle
