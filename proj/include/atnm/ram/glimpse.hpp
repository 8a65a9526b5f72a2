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

#include <string_view>
#include <vector>

#include "atnm/features/spectrogram.hpp"
#include "atnm/model.hpp"
#include "atnm/nn/conv.hpp"
#include "atnm/nn/linear.hpp"

namespace atnm {

/// Normalised glimpse position; both coordinates live in [-1, 1].
struct Location {
  double time = 0.0;
  double freq = 0.0;

  Location clamped() const;
  friend bool operator==(const Location&, const Location&) = default;
};

/// Cell a location points at: round((l + 1) / 2 * (n - 1)) on each axis.
std::size_t location_to_cell(double coord, std::size_t n);

/// K patches centred on one location, each pooled to the first (smallest)
/// size: patches is [K x s1.frames x s1.bins].
struct GlimpsePatchSet {
  std::vector<PatchSize> sizes;
  Tensor patches;

  std::size_t count() const { return sizes.size(); }
  PatchSize base() const { return sizes.front(); }
};

/// Throws ConfigError unless sizes is nonempty, strictly increasing and every
/// size is a whole multiple of the first.
void validate_glimpse_sizes(const std::vector<PatchSize>& sizes);

/// Window k spans rows [c - s/2, c - s/2 + s) around the centre cell c on each
/// axis (integer division), zero outside the spectrogram, then average-pooled
/// down to sizes[0].
GlimpsePatchSet glimpse_extract(const Spectrogram& x, const Location& l, const std::vector<PatchSize>& sizes);

enum class EncoderKind { FlatFc, RectConv };
EncoderKind parse_encoder(std::string_view name);
std::string_view encoder_name(EncoderKind kind);

/// Patches -> q in R^G. flat-fc: one ReLU layer over the flattened patches.
/// rect-conv: per patch, four banks of rectangular kernels (7 and 3 frames by
/// 1 bin for temporal patterns, 1 frame by 7 and 3 bins for timbral ones),
/// each map max-pooled to a scalar, then a ReLU layer to G.
class GlimpseEncoder {
 public:
  struct Cache {
    Tensor input;                               // flattened or [K x 1 x h x w]
    std::vector<Tensor> conv_out;               // rect-conv
    std::vector<std::vector<std::size_t>> argmax;
    Tensor pooled;                              // [1 x features] before fc
    Tensor q;
  };

  GlimpseEncoder() = default;
  GlimpseEncoder(EncoderKind kind, std::size_t patches, PatchSize base, std::size_t maps, std::size_t out, Rng& rng);

  Tensor forward(const GlimpsePatchSet& g, Cache* cache) const;
  /// Returns dL/dpatches, shaped like GlimpsePatchSet::patches.
  Tensor backward(const Cache& cache, const Tensor& dq);
  void collect(ParamList& out);

  EncoderKind kind = EncoderKind::FlatFc;
  std::size_t patch_count = 0;
  PatchSize base{0, 0};
  std::vector<Conv2dRect> banks;
  Linear fc;
};

/// rho = relu(W_g (q + f_l(l)) + b_g) with q from the encoder and
/// f_l(l) = relu(W_l l + b_l). The location enters as data only.
class GlimpseNetwork {
 public:
  struct Cache {
    GlimpseEncoder::Cache encoder;
    Tensor loc_input;  // [1 x 2]
    Tensor loc_feat;
    Tensor combined;
    Tensor rho;
  };

  GlimpseNetwork() = default;
  GlimpseNetwork(EncoderKind kind, std::size_t patches, PatchSize base, std::size_t maps, std::size_t features,
                 Rng& rng);

  Tensor forward(const GlimpsePatchSet& g, const Location& l, Cache* cache) const;
  Tensor backward(const Cache& cache, const Tensor& drho);
  void collect(ParamList& out);

  GlimpseEncoder encoder;
  Linear location;
  Linear glimpse;
};

Tensor glimpse_encode(const GlimpsePatchSet& g, const Location& l, const GlimpseNetwork& net);

}  // namespace atnm
