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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "atnm/nn/parameter.hpp"

namespace atnm {

inline constexpr char kCheckpointMagic[4] = {'A', 'T', 'N', 'M'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

/// Named single-precision parameter snapshot plus the architecture and
/// training metadata needed to rebuild the model.
///
/// File layout: "ATNM", u32 version, u32 header length, UTF-8 JSON header
/// (variant, model, metadata, tensors[{name, shape}], payload_crc32), then
/// the tensors as little-endian f32 in header order.
struct Checkpoint {
  std::string variant;
  nlohmann::json model = nlohmann::json::object();
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<CheckpointTensor> tensors;
};

Checkpoint capture_checkpoint(std::string variant, nlohmann::json model, nlohmann::json metadata,
                              const ParamList& params);
/// Copies tensors into `params` by name. Missing names or shape mismatches
/// throw FormatError.
void restore_checkpoint(const Checkpoint& checkpoint, const ParamList& params);

/// Rounds every parameter value to single precision in place (the precision
/// a checkpoint stores).
void quantize_to_checkpoint_precision(const ParamList& params);

std::vector<unsigned char> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes);
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace atnm
