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

#include "atnm/features/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "atnm/error.hpp"
#include "atnm/nn/parameter.hpp"

namespace atnm {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kProfileStream = ~std::uint64_t{0};
constexpr std::uint64_t kSplitStream = ~std::uint64_t{0} - 1;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

ValueRange centers_of(const SynthConfig& cfg) {
  if (cfg.center_bins) return *cfg.center_bins;
  return {1.0, static_cast<double>(cfg.bins) - 2.0};
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.classes < 2) throw ConfigError("synthetic data needs at least 2 classes");
  if (cfg.examples == 0) throw ConfigError("synthetic data needs at least 1 example");
  if (cfg.frames == 0 || cfg.bins == 0) throw ConfigError("spectrogram dimensions must be positive");
  if (!is_probability(cfg.known_prob)) throw ConfigError("known_prob must lie in [0, 1]");
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0)) throw ConfigError("test_fraction must lie in [0, 1)");
  if (cfg.positive_rates.size() != 1 && cfg.positive_rates.size() != cfg.classes) {
    throw ConfigError("positive_rates needs 1 or " + std::to_string(cfg.classes) + " entries");
  }
  for (double p : cfg.positive_rates) {
    if (!is_probability(p)) throw ConfigError("positive rates must lie in [0, 1]");
  }
  if (!(cfg.bandwidth.lo >= 1.0 && cfg.bandwidth.hi >= cfg.bandwidth.lo)) {
    throw ConfigError("bandwidth range must satisfy 1 <= lo <= hi");
  }
  if (cfg.bandwidth.hi > static_cast<double>(cfg.bins)) {
    throw ConfigError("bandwidth " + std::to_string(cfg.bandwidth.hi) + " exceeds " + std::to_string(cfg.bins) +
                      " bins");
  }
  if (!(cfg.duty_cycle.lo > 0.0 && cfg.duty_cycle.hi <= 1.0 && cfg.duty_cycle.lo <= cfg.duty_cycle.hi)) {
    throw ConfigError("duty cycle range must satisfy 0 < lo <= hi <= 1");
  }
  const ValueRange c = centers_of(cfg);
  if (!(c.lo >= 0.0 && c.hi <= static_cast<double>(cfg.bins - 1) && c.lo <= c.hi)) {
    throw ConfigError("center bin range must lie within [0, bins-1]");
  }
  if (!(cfg.noise_std >= 0.0)) throw ConfigError("noise_std must be nonnegative");
}

std::vector<ClassProfile> synth_class_profiles(const SynthConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, kProfileStream));
  std::uniform_real_distribution<double> width_dist(cfg.bandwidth.lo, cfg.bandwidth.hi);
  const ValueRange centers = centers_of(cfg);
  std::vector<ClassProfile> profiles;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    const double center =
        centers.lo + (static_cast<double>(c) + 0.5) * (centers.hi - centers.lo) / static_cast<double>(cfg.classes);
    const auto width = static_cast<std::size_t>(std::max(1.0, std::round(width_dist(rng))));
    const double start = std::round(center - static_cast<double>(width) / 2.0);
    const auto first =
        static_cast<std::size_t>(std::clamp(start, 0.0, static_cast<double>(cfg.bins - width)));
    profiles.push_back({first, width});
  }
  return profiles;
}

std::vector<LabeledExample> synth_generate(const SynthConfig& cfg) {
  const auto profiles = synth_class_profiles(cfg);
  const std::size_t width_digits = std::to_string(cfg.examples - 1).size();
  std::vector<LabeledExample> out(cfg.examples);
  for (std::size_t i = 0; i < cfg.examples; ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    LabeledExample& ex = out[i];
    std::string id = std::to_string(i);
    ex.id = "ex" + std::string(width_digits - id.size(), '0') + id;
    ex.spectrogram = Spectrogram(cfg.frames, cfg.bins);
    ex.labels.assign(cfg.classes, 0.0);
    ex.known.assign(cfg.classes, 0);
    for (std::size_t c = 0; c < cfg.classes; ++c) {
      const bool positive = unit(rng) < cfg.positive_rate(c);
      const bool known = unit(rng) < cfg.known_prob;
      const double duty = cfg.duty_cycle.lo + (cfg.duty_cycle.hi - cfg.duty_cycle.lo) * unit(rng);
      const double onset = unit(rng);
      const double level = cfg.note_level * (0.75 + 0.5 * unit(rng));
      // Unannotated classes carry no label, as in the stored container.
      ex.labels[c] = positive && known ? 1.0 : 0.0;
      ex.known[c] = known ? 1 : 0;
      if (!positive) continue;
      const auto length = static_cast<std::size_t>(
          std::clamp(std::round(duty * static_cast<double>(cfg.frames)), 1.0, static_cast<double>(cfg.frames)));
      const auto first_frame = static_cast<std::size_t>(onset * static_cast<double>(cfg.frames - length + 1));
      const ClassProfile& p = profiles[c];
      for (std::size_t t = first_frame; t < std::min(cfg.frames, first_frame + length); ++t) {
        for (std::size_t b = p.first_bin; b < p.first_bin + p.width; ++b) ex.spectrogram.at(t, b) += level;
      }
    }
    for (double& v : ex.spectrogram.values) {
      v = static_cast<double>(static_cast<float>(v + cfg.noise_std * noise(rng)));
    }
  }
  return out;
}

Dataset synth_dataset(const SynthConfig& cfg) {
  Dataset ds;
  ds.examples = synth_generate(cfg);
  ds.class_names = default_class_names(cfg.classes);
  ds.generator = to_json(cfg);
  const std::size_t n = ds.examples.size();
  const auto test_count = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, kSplitStream));
  std::shuffle(order.begin(), order.end(), rng);
  ds.splits.assign(n, "train");
  for (std::size_t k = 0; k < test_count; ++k) ds.splits[order[k]] = "test";
  return ds;
}

namespace {

ValueRange range_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError("ranges are given as [lo, hi]");
  return {v[0], v[1]};
}

}  // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  try {
    cfg.classes = j.value("classes", cfg.classes);
    cfg.examples = j.value("examples", cfg.examples);
    cfg.frames = j.value("frames", cfg.frames);
    cfg.bins = j.value("bins", cfg.bins);
    if (j.contains("center_bins") && !j["center_bins"].is_null()) cfg.center_bins = range_from_json(j["center_bins"]);
    if (j.contains("bandwidth")) cfg.bandwidth = range_from_json(j["bandwidth"]);
    if (j.contains("duty_cycle")) cfg.duty_cycle = range_from_json(j["duty_cycle"]);
    cfg.known_prob = j.value("known_prob", cfg.known_prob);
    if (j.contains("positive_rates")) {
      cfg.positive_rates = j["positive_rates"].is_array() ? j["positive_rates"].get<std::vector<double>>()
                                                          : std::vector<double>{j["positive_rates"].get<double>()};
    }
    cfg.noise_std = j.value("noise_std", cfg.noise_std);
    cfg.note_level = j.value("note_level", cfg.note_level);
    cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad synth config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const SynthConfig& cfg) {
  nlohmann::json j = {{"classes", cfg.classes},
                      {"examples", cfg.examples},
                      {"frames", cfg.frames},
                      {"bins", cfg.bins},
                      {"bandwidth", {cfg.bandwidth.lo, cfg.bandwidth.hi}},
                      {"duty_cycle", {cfg.duty_cycle.lo, cfg.duty_cycle.hi}},
                      {"known_prob", cfg.known_prob},
                      {"positive_rates", cfg.positive_rates},
                      {"noise_std", cfg.noise_std},
                      {"note_level", cfg.note_level},
                      {"test_fraction", cfg.test_fraction},
                      {"seed", cfg.seed}};
  const ValueRange c = centers_of(cfg);
  j["center_bins"] = {c.lo, c.hi};
  return j;
}

}  // namespace atnm
