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

#include <vector>

#include "atnm/features/tiling.hpp"
#include "atnm/nn/linear.hpp"

namespace atnm {

/// Trainable stand-in for a pretrained CNN front end: each flattened tile
/// goes through a shared layer to `hidden` units (ReLU), then through the
/// projection owned by its frequency column to `out` features.
class PatchEmbedding {
 public:
  struct Cache {
    Tensor hidden;  // post-ReLU, [(T'F') x hidden]
  };

  PatchEmbedding() = default;
  PatchEmbedding(std::size_t tile_cells, std::size_t freq_tiles, std::size_t hidden, std::size_t out, Rng& rng);

  InstanceGrid forward(const TileGrid& tiles, Cache* cache) const;
  void backward(const TileGrid& tiles, const Cache& cache, const Tensor& d_features);

  void collect(ParamList& out);
  std::size_t out_features() const { return columns.front().out_features(); }

  Linear shared;
  std::vector<Linear> columns;  // one per frequency column
};

}  // namespace atnm
