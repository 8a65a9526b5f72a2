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

namespace atnm {

/// T x F grid of log-magnitude values, time-major.
struct Spectrogram {
  Spectrogram() = default;
  Spectrogram(std::size_t frames, std::size_t bins, double fill = 0.0);

  double& at(std::size_t t, std::size_t f) { return values[t * bins + f]; }
  double at(std::size_t t, std::size_t f) const { return values[t * bins + f]; }

  friend bool operator==(const Spectrogram&, const Spectrogram&) = default;

  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> values;
};

/// Label byte values in the container format.
enum class LabelState : std::uint8_t { Negative = 0, Positive = 1, Unknown = 2 };

struct LabeledExample {
  std::string id;
  Spectrogram spectrogram;
  std::vector<double> labels;       // in [0, 1]; ignored where !known
  std::vector<std::uint8_t> known;  // 1 = label annotated

  std::size_t classes() const { return labels.size(); }
  std::size_t known_count() const;
  LabelState state(std::size_t c) const;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

inline constexpr char kSpectrogramMagic[4] = {'S', 'P', 'E', 'C'};
inline constexpr std::uint32_t kSpectrogramVersion = 1;

/// Container: "SPEC", u32 version, u32 T, u32 F, u32 C, C label bytes
/// (0 neg, 1 pos, 2 unknown), T*F little-endian f32 values, time-major.
/// Labels are binarised at 0.5 and values rounded to single precision.
std::vector<unsigned char> encode_spectrogram(const LabeledExample& example);
/// `id` is not stored in the container; the caller supplies it.
LabeledExample decode_spectrogram(const std::vector<unsigned char>& bytes, std::string id);
void save_spectrogram_file(const LabeledExample& example, const std::string& path);
LabeledExample load_spectrogram_file(const std::string& path, std::string id = {});

/// Examples plus their split assignment ("train" or "test").
struct Dataset {
  std::vector<std::string> class_names;
  std::vector<LabeledExample> examples;
  std::vector<std::string> splits;
  nlohmann::json generator = nlohmann::json::object();

  std::vector<LabeledExample> split(const std::string& name) const;
};

/// Writes `<dir>/<id>.spec` per example and `<dir>/manifest.json`.
void save_dataset(const Dataset& dataset, const std::string& dir);
Dataset load_dataset(const std::string& dir);

/// The OpenMIC-2018 instrument names; `count` beyond 20 gets "class_<i>".
std::vector<std::string> default_class_names(std::size_t count);

}  // namespace atnm
