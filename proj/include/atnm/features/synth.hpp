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
#include <optional>
#include <vector>

#include <json.hpp>

#include "atnm/features/spectrogram.hpp"

namespace atnm {

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Band-limited synthetic "instrument" classes. Class c owns a band of bins
/// around a center spread evenly over `center_bins`; when present in an
/// example it plays one note spanning a contiguous stretch of frames.
struct SynthConfig {
  std::size_t classes = 20;
  std::size_t examples = 1000;
  std::size_t frames = 998;
  std::size_t bins = 64;
  std::optional<ValueRange> center_bins;  // default: [1, bins - 2]
  ValueRange bandwidth{2.0, 4.0};         // bins, drawn once per class
  ValueRange duty_cycle{0.1, 0.5};        // fraction of frames, drawn per note
  double known_prob = 0.8;
  std::vector<double> positive_rates{0.3};  // one entry, or one per class
  double noise_std = 0.3;
  double note_level = 1.0;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  double positive_rate(std::size_t c) const {
    return positive_rates.size() == 1 ? positive_rates.front() : positive_rates.at(c);
  }
};

/// Throws ConfigError on out-of-range probabilities, C < 2, bands wider than
/// the spectrogram, and the like.
void validate(const SynthConfig& cfg);

struct ClassProfile {
  std::size_t first_bin;
  std::size_t width;
};

std::vector<ClassProfile> synth_class_profiles(const SynthConfig& cfg);

/// Deterministic in cfg.seed; example i draws from its own derived stream.
/// Values are rounded to single precision so they survive the container
/// format unchanged.
std::vector<LabeledExample> synth_generate(const SynthConfig& cfg);

/// synth_generate plus a seeded train/test assignment of
/// round(test_fraction * N) test examples.
Dataset synth_dataset(const SynthConfig& cfg);

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& cfg);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace atnm
