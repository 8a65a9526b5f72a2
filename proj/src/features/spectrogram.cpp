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

#include "atnm/features/spectrogram.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "atnm/binary_io.hpp"
#include "atnm/error.hpp"

namespace atnm {

Spectrogram::Spectrogram(std::size_t frames, std::size_t bins, double fill)
    : frames(frames), bins(bins), values(frames * bins, fill) {
  if (frames == 0 || bins == 0) throw DimensionError("spectrogram needs at least one frame and one bin");
}

std::size_t LabeledExample::known_count() const {
  return static_cast<std::size_t>(std::count_if(known.begin(), known.end(), [](std::uint8_t k) { return k != 0; }));
}

LabelState LabeledExample::state(std::size_t c) const {
  if (!known.at(c)) return LabelState::Unknown;
  return labels.at(c) >= 0.5 ? LabelState::Positive : LabelState::Negative;
}

std::vector<unsigned char> encode_spectrogram(const LabeledExample& ex) {
  const Spectrogram& s = ex.spectrogram;
  if (s.values.size() != s.frames * s.bins) throw DimensionError("spectrogram values do not match T x F");
  if (ex.known.size() != ex.labels.size()) throw DimensionError("label and mask lengths differ");
  std::vector<unsigned char> out(std::begin(kSpectrogramMagic), std::end(kSpectrogramMagic));
  out.reserve(20 + ex.labels.size() + 4 * s.values.size());
  detail::put_u32(out, kSpectrogramVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(s.frames));
  detail::put_u32(out, static_cast<std::uint32_t>(s.bins));
  detail::put_u32(out, static_cast<std::uint32_t>(ex.labels.size()));
  for (std::size_t c = 0; c < ex.labels.size(); ++c) out.push_back(static_cast<unsigned char>(ex.state(c)));
  for (double v : s.values) detail::put_f32(out, static_cast<float>(v));
  return out;
}

LabeledExample decode_spectrogram(const std::vector<unsigned char>& bytes, std::string id) {
  detail::ByteReader in(bytes, id.empty() ? std::string("spectrogram") : "spectrogram '" + id + "'");
  if (in.str(4, "magic") != std::string(kSpectrogramMagic, 4)) {
    throw FormatError("spectrogram: bad magic at offset 0 (expected \"SPEC\")");
  }
  const std::uint32_t version = in.u32("version");
  if (version != kSpectrogramVersion) in.fail("unsupported version " + std::to_string(version));
  const std::uint32_t frames = in.u32("frame count");
  const std::uint32_t bins = in.u32("bin count");
  const std::uint32_t classes = in.u32("class count");
  if (frames == 0 || bins == 0) in.fail("empty spectrogram");
  LabeledExample ex;
  ex.id = std::move(id);
  ex.labels.resize(classes);
  ex.known.resize(classes);
  for (std::uint32_t c = 0; c < classes; ++c) {
    const unsigned char b = in.byte("label");
    if (b > 2) in.fail("invalid label byte " + std::to_string(b));
    ex.known[c] = b != static_cast<unsigned char>(LabelState::Unknown);
    ex.labels[c] = b == static_cast<unsigned char>(LabelState::Positive) ? 1.0 : 0.0;
  }
  const std::size_t n = static_cast<std::size_t>(frames) * bins;
  if (in.remaining() != 4 * n) {
    in.fail("payload is " + std::to_string(in.remaining()) + " bytes, expected 4*" + std::to_string(frames) + "*" +
            std::to_string(bins) + " = " + std::to_string(4 * n));
  }
  ex.spectrogram = Spectrogram(frames, bins);
  for (std::size_t i = 0; i < n; ++i) ex.spectrogram.values[i] = static_cast<double>(in.f32("value"));
  return ex;
}

void save_spectrogram_file(const LabeledExample& example, const std::string& path) {
  detail::write_file_bytes(path, encode_spectrogram(example));
}

LabeledExample load_spectrogram_file(const std::string& path, std::string id) {
  if (id.empty()) id = std::filesystem::path(path).stem().string();
  return decode_spectrogram(detail::read_file_bytes(path), std::move(id));
}

std::vector<LabeledExample> Dataset::split(const std::string& name) const {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (splits.at(i) == name) out.push_back(examples[i]);
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
  namespace fs = std::filesystem;
  if (dataset.splits.size() != dataset.examples.size()) throw DimensionError("one split entry per example required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create dataset directory '" + dir + "': " + ec.message());
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    const auto& ex = dataset.examples[i];
    const std::string file = ex.id + ".spec";
    save_spectrogram_file(ex, (fs::path(dir) / file).string());
    entries.push_back({{"id", ex.id}, {"file", file}, {"split", dataset.splits[i]}});
  }
  const nlohmann::json manifest = {{"format", "atnm-dataset"},
                                   {"version", 1},
                                   {"class_names", dataset.class_names},
                                   {"examples", entries},
                                   {"generator", dataset.generator}};
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest in '" + dir + "'");
  out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw FormatError("no manifest.json in '" + dir + "'");
  Dataset ds;
  try {
    const nlohmann::json manifest = nlohmann::json::parse(in);
    ds.class_names = manifest.at("class_names").get<std::vector<std::string>>();
    ds.generator = manifest.value("generator", nlohmann::json::object());
    for (const auto& e : manifest.at("examples")) {
      const std::string id = e.at("id").get<std::string>();
      ds.examples.push_back(load_spectrogram_file((fs::path(dir) / e.at("file").get<std::string>()).string(), id));
      ds.splits.push_back(e.at("split").get<std::string>());
      if (ds.examples.back().classes() != ds.class_names.size()) {
        throw FormatError("example '" + id + "' has " + std::to_string(ds.examples.back().classes()) +
                          " labels, manifest lists " + std::to_string(ds.class_names.size()) + " classes");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed manifest '" + manifest_path.string() + "': " + e.what());
  }
  return ds;
}

std::vector<std::string> default_class_names(std::size_t count) {
  static const std::vector<std::string> openmic = {
      "accordion", "banjo",    "bass",      "cello",     "clarinet",    "cymbals",  "drums",
      "flute",     "guitar",   "mallet_percussion",      "mandolin",    "organ",    "piano",
      "saxophone", "synthesizer", "trombone", "trumpet",  "ukulele",     "violin",   "voice"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) {
    names.push_back(i < openmic.size() ? openmic[i] : "class_" + std::to_string(i));
  }
  return names;
}

}  // namespace atnm
