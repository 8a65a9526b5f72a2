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

#include "atnm/features/patch_embed.hpp"

#include <string>

#include "atnm/error.hpp"
#include "atnm/nn/activation.hpp"

namespace atnm {
namespace {

// Rows of `m` belonging to frequency column f.
Tensor gather_column(const Tensor& m, std::size_t freq_tiles, std::size_t f) {
  const std::size_t rows = m.rows() / freq_tiles;
  Tensor out = Tensor::matrix(rows, m.cols());
  for (std::size_t t = 0; t < rows; ++t) {
    const auto src = m.row_span(t * freq_tiles + f);
    std::copy(src.begin(), src.end(), out.row_span(t).begin());
  }
  return out;
}

void scatter_column(const Tensor& part, std::size_t freq_tiles, std::size_t f, Tensor& m) {
  for (std::size_t t = 0; t < part.rows(); ++t) {
    const auto src = part.row_span(t);
    std::copy(src.begin(), src.end(), m.row_span(t * freq_tiles + f).begin());
  }
}

}  // namespace

PatchEmbedding::PatchEmbedding(std::size_t tile_cells, std::size_t freq_tiles, std::size_t hidden, std::size_t out,
                               Rng& rng)
    : shared("patch.shared", tile_cells, hidden, rng) {
  columns.reserve(freq_tiles);
  for (std::size_t f = 0; f < freq_tiles; ++f) columns.emplace_back("patch.column" + std::to_string(f), hidden, out, rng);
}

InstanceGrid PatchEmbedding::forward(const TileGrid& tiles, Cache* cache) const {
  if (tiles.freq_tiles != columns.size()) {
    throw DimensionError("patch embedding has " + std::to_string(columns.size()) + " column projections, grid has " +
                         std::to_string(tiles.freq_tiles) + " frequency columns");
  }
  Tensor hidden = activate(shared.forward(tiles.tiles), Activation::Relu);
  InstanceGrid grid{tiles.time_tiles, tiles.freq_tiles, Tensor::matrix(tiles.instances(), out_features())};
  for (std::size_t f = 0; f < columns.size(); ++f) {
    scatter_column(columns[f].forward(gather_column(hidden, tiles.freq_tiles, f)), tiles.freq_tiles, f,
                   grid.features);
  }
  if (cache != nullptr) cache->hidden = std::move(hidden);
  return grid;
}

void PatchEmbedding::backward(const TileGrid& tiles, const Cache& cache, const Tensor& d_features) {
  require_shape(d_features, {tiles.instances(), out_features()}, "patch embedding upstream");
  Tensor d_hidden(cache.hidden.shape());
  for (std::size_t f = 0; f < columns.size(); ++f) {
    const Tensor dh = columns[f].backward(gather_column(cache.hidden, tiles.freq_tiles, f),
                                          gather_column(d_features, tiles.freq_tiles, f));
    scatter_column(dh, tiles.freq_tiles, f, d_hidden);
  }
  shared.backward(tiles.tiles, activate_backward(cache.hidden, d_hidden, Activation::Relu), false);
}

void PatchEmbedding::collect(ParamList& out) {
  shared.collect(out);
  for (auto& c : columns) c.collect(out);
}

}  // namespace atnm
