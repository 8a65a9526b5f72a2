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

#include "atnm/features/spectrogram.hpp"
#include "atnm/nn/tensor.hpp"

namespace atnm {

struct CellRange {
  std::size_t begin;  // inclusive
  std::size_t end;    // exclusive
};

/// Non-overlapping tiles of a spectrogram. Instance (t, f) is row t*F' + f of
/// `tiles`, holding its cells flattened time-major.
struct TileGrid {
  std::size_t time_tiles = 0;  // T'
  std::size_t freq_tiles = 0;  // F'
  std::size_t tile_frames = 0;
  std::size_t tile_bins = 0;
  Tensor tiles;  // [(T'*F') x (tile_frames*tile_bins)]

  std::size_t instances() const { return time_tiles * freq_tiles; }
  CellRange frame_range(std::size_t t) const { return {t * tile_frames, (t + 1) * tile_frames}; }
  CellRange bin_range(std::size_t f) const { return {f * tile_bins, (f + 1) * tile_bins}; }
};

/// Tiles of floor(T/T') x floor(F/F') cells; trailing frames and bins that
/// do not fill a whole tile are dropped.
TileGrid tile_spectrogram(const Spectrogram& x, std::size_t time_tiles, std::size_t freq_tiles);

/// (T'*F') x D instance features, row t*F' + f for coordinate (t, f).
struct InstanceGrid {
  std::size_t time_steps = 0;
  std::size_t freq_bands = 0;
  Tensor features;

  std::size_t instances() const { return time_steps * freq_bands; }
  std::size_t dim() const { return features.cols(); }
  std::size_t index(std::size_t t, std::size_t f) const { return t * freq_bands + f; }
};

}  // namespace atnm
