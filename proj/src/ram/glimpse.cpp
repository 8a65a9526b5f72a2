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

#include "atnm/ram/glimpse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atnm/error.hpp"
#include "atnm/nn/activation.hpp"

namespace atnm {

Location Location::clamped() const { return {std::clamp(time, -1.0, 1.0), std::clamp(freq, -1.0, 1.0)}; }

std::size_t location_to_cell(double coord, std::size_t n) {
  const double c = std::clamp(coord, -1.0, 1.0);
  return static_cast<std::size_t>(std::lround((c + 1.0) / 2.0 * static_cast<double>(n - 1)));
}

void validate_glimpse_sizes(const std::vector<PatchSize>& sizes) {
  if (sizes.empty()) throw ConfigError("glimpse needs at least one patch size");
  const PatchSize base = sizes.front();
  if (base.frames == 0 || base.bins == 0) throw ConfigError("glimpse patch sizes must be positive");
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    const PatchSize s = sizes[k];
    if (s.frames <= sizes[k - 1].frames || s.bins <= sizes[k - 1].bins) {
      throw ConfigError("glimpse patch sizes must be strictly increasing");
    }
    if (s.frames % base.frames != 0 || s.bins % base.bins != 0) {
      throw ConfigError("glimpse patch " + std::to_string(s.frames) + "x" + std::to_string(s.bins) +
                        " is not a whole multiple of " + std::to_string(base.frames) + "x" +
                        std::to_string(base.bins));
    }
  }
}

GlimpsePatchSet glimpse_extract(const Spectrogram& x, const Location& l, const std::vector<PatchSize>& sizes) {
  validate_glimpse_sizes(sizes);
  const PatchSize base = sizes.front();
  const auto ct = static_cast<std::ptrdiff_t>(location_to_cell(l.time, x.frames));
  const auto cf = static_cast<std::ptrdiff_t>(location_to_cell(l.freq, x.bins));
  GlimpsePatchSet g{sizes, Tensor({sizes.size(), base.frames, base.bins})};
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const PatchSize s = sizes[k];
    const std::size_t pool_t = s.frames / base.frames, pool_f = s.bins / base.bins;
    const auto cells_per_pool = static_cast<double>(pool_t * pool_f);
    const std::ptrdiff_t t0 = ct - static_cast<std::ptrdiff_t>(s.frames / 2);
    const std::ptrdiff_t f0 = cf - static_cast<std::ptrdiff_t>(s.bins / 2);
    double* out = g.patches.data() + k * base.frames * base.bins;
    for (std::size_t i = 0; i < s.frames; ++i) {
      const std::ptrdiff_t t = t0 + static_cast<std::ptrdiff_t>(i);
      if (t < 0 || t >= static_cast<std::ptrdiff_t>(x.frames)) continue;
      for (std::size_t j = 0; j < s.bins; ++j) {
        const std::ptrdiff_t f = f0 + static_cast<std::ptrdiff_t>(j);
        if (f < 0 || f >= static_cast<std::ptrdiff_t>(x.bins)) continue;
        out[(i / pool_t) * base.bins + j / pool_f] += x.at(static_cast<std::size_t>(t), static_cast<std::size_t>(f));
      }
    }
    if (pool_t * pool_f > 1) {
      for (std::size_t c = 0; c < base.frames * base.bins; ++c) out[c] /= cells_per_pool;
    }
  }
  return g;
}

EncoderKind parse_encoder(std::string_view name) {
  if (name == "flat-fc") return EncoderKind::FlatFc;
  if (name == "rect-conv") return EncoderKind::RectConv;
  throw ConfigError("unknown glimpse encoder '" + std::string(name) + "' (expected flat-fc|rect-conv)");
}

std::string_view encoder_name(EncoderKind kind) { return kind == EncoderKind::FlatFc ? "flat-fc" : "rect-conv"; }

namespace {

// (frames, bins) extents of the musically shaped kernel banks.
constexpr PatchSize kBankShapes[] = {{7, 1}, {3, 1}, {1, 7}, {1, 3}};

}  // namespace

GlimpseEncoder::GlimpseEncoder(EncoderKind kind, std::size_t patches, PatchSize base, std::size_t maps,
                               std::size_t out, Rng& rng)
    : kind(kind), patch_count(patches), base(base) {
  if (kind == EncoderKind::FlatFc) {
    fc = Linear("sensor.fc", patches * base.frames * base.bins, out, rng);
    return;
  }
  for (const PatchSize s : kBankShapes) {
    if (s.frames > base.frames || s.bins > base.bins) {
      throw ConfigError("rect-conv kernels need glimpse patches of at least 7x7 cells");
    }
    banks.emplace_back("sensor.conv" + std::to_string(s.frames) + "x" + std::to_string(s.bins), maps, s.frames, s.bins,
                       rng);
  }
  fc = Linear("sensor.fc", patches * banks.size() * maps, out, rng);
}

Tensor GlimpseEncoder::forward(const GlimpsePatchSet& g, Cache* cache) const {
  if (g.count() != patch_count || g.base() != base) {
    throw DimensionError("glimpse encoder expects " + std::to_string(patch_count) + " patches of " +
                         std::to_string(base.frames) + "x" + std::to_string(base.bins) + ", got " +
                         std::to_string(g.count()) + " of " + std::to_string(g.base().frames) + "x" +
                         std::to_string(g.base().bins));
  }
  Cache local;
  Cache& c = cache != nullptr ? *cache : local;
  if (kind == EncoderKind::FlatFc) {
    c.input = g.patches.reshaped({1, g.patches.size()});
    c.pooled = c.input;
  } else {
    c.input = g.patches.reshaped({patch_count, 1, base.frames, base.bins});
    const std::size_t maps = banks.front().maps();
    c.pooled = Tensor::matrix(1, patch_count * banks.size() * maps);
    c.conv_out.clear();
    c.argmax.clear();
    for (std::size_t b = 0; b < banks.size(); ++b) {
      c.conv_out.push_back(banks[b].forward(c.input));
      c.argmax.emplace_back();
      const Tensor pooled = global_max_pool(c.conv_out.back(), &c.argmax.back());  // [K x maps]
      for (std::size_t k = 0; k < patch_count; ++k) {
        for (std::size_t m = 0; m < maps; ++m) c.pooled[(k * banks.size() + b) * maps + m] = pooled.at(k, m);
      }
    }
  }
  c.q = activate(fc.forward(c.pooled), Activation::Relu);
  return c.q;
}

Tensor GlimpseEncoder::backward(const Cache& c, const Tensor& dq) {
  const Tensor d_pooled = fc.backward(c.pooled, activate_backward(c.q, dq, Activation::Relu));
  if (kind == EncoderKind::FlatFc) return d_pooled.reshaped({patch_count, base.frames, base.bins});
  const std::size_t maps = banks.front().maps();
  Tensor d_input(c.input.shape());
  for (std::size_t b = 0; b < banks.size(); ++b) {
    Tensor d_maps = Tensor::matrix(patch_count, maps);
    for (std::size_t k = 0; k < patch_count; ++k) {
      for (std::size_t m = 0; m < maps; ++m) d_maps.at(k, m) = d_pooled[(k * banks.size() + b) * maps + m];
    }
    const Tensor d_conv = global_max_pool_backward(c.conv_out[b].shape(), c.argmax[b], d_maps);
    const Tensor dx = banks[b].backward(c.input, d_conv);
    for (std::size_t i = 0; i < dx.size(); ++i) d_input[i] += dx[i];
  }
  return d_input.reshaped({patch_count, base.frames, base.bins});
}

void GlimpseEncoder::collect(ParamList& out) {
  for (auto& b : banks) b.collect(out);
  fc.collect(out);
}

GlimpseNetwork::GlimpseNetwork(EncoderKind kind, std::size_t patches, PatchSize base, std::size_t maps,
                               std::size_t features, Rng& rng)
    : encoder(kind, patches, base, maps, features, rng),
      location("glimpse.location", 2, features, rng),
      glimpse("glimpse.fc", features, features, rng) {}

Tensor GlimpseNetwork::forward(const GlimpsePatchSet& g, const Location& l, Cache* cache) const {
  Cache local;
  Cache& c = cache != nullptr ? *cache : local;
  const Tensor q = encoder.forward(g, &c.encoder);
  c.loc_input = Tensor::row({l.time, l.freq});
  c.loc_feat = activate(location.forward(c.loc_input), Activation::Relu);
  c.combined = q;
  for (std::size_t i = 0; i < c.combined.size(); ++i) c.combined[i] += c.loc_feat[i];
  c.rho = activate(glimpse.forward(c.combined), Activation::Relu);
  return c.rho;
}

Tensor GlimpseNetwork::backward(const Cache& c, const Tensor& drho) {
  const Tensor d_combined = glimpse.backward(c.combined, activate_backward(c.rho, drho, Activation::Relu));
  location.backward(c.loc_input, activate_backward(c.loc_feat, d_combined, Activation::Relu), false);
  return encoder.backward(c.encoder, d_combined);
}

void GlimpseNetwork::collect(ParamList& out) {
  encoder.collect(out);
  location.collect(out);
  glimpse.collect(out);
}

Tensor glimpse_encode(const GlimpsePatchSet& g, const Location& l, const GlimpseNetwork& net) {
  return net.forward(g, l, nullptr);
}

}  // namespace atnm
