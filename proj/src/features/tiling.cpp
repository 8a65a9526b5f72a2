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

#include "atnm/features/tiling.hpp"

#include <string>

#include "atnm/error.hpp"

namespace atnm {

TileGrid tile_spectrogram(const Spectrogram& x, std::size_t time_tiles, std::size_t freq_tiles) {
  if (time_tiles == 0 || freq_tiles == 0 || time_tiles > x.frames || freq_tiles > x.bins) {
    throw DimensionError("cannot tile a " + std::to_string(x.frames) + "x" + std::to_string(x.bins) +
                         " spectrogram into " + std::to_string(time_tiles) + "x" + std::to_string(freq_tiles) +
                         " tiles");
  }
  TileGrid grid;
  grid.time_tiles = time_tiles;
  grid.freq_tiles = freq_tiles;
  grid.tile_frames = x.frames / time_tiles;
  grid.tile_bins = x.bins / freq_tiles;
  const std::size_t cells = grid.tile_frames * grid.tile_bins;
  grid.tiles = Tensor::matrix(grid.instances(), cells);
  for (std::size_t t = 0; t < time_tiles; ++t) {
    for (std::size_t f = 0; f < freq_tiles; ++f) {
      double* dst = grid.tiles.data() + (t * freq_tiles + f) * cells;
      for (std::size_t dt = 0; dt < grid.tile_frames; ++dt) {
        const double* src = x.values.data() + (t * grid.tile_frames + dt) * x.bins + f * grid.tile_bins;
        std::copy(src, src + grid.tile_bins, dst + dt * grid.tile_bins);
      }
    }
  }
  return grid;
}

}  // namespace atnm
