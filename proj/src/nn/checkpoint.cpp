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

#include "atnm/nn/checkpoint.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <map>

#include "atnm/binary_io.hpp"
#include "atnm/error.hpp"

namespace atnm {

namespace detail {

std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace detail

namespace {

std::uint32_t crc_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

Checkpoint capture_checkpoint(std::string variant, nlohmann::json model, nlohmann::json metadata,
                              const ParamList& params) {
  Checkpoint ck{std::move(variant), std::move(model), std::move(metadata), {}};
  ck.tensors.reserve(params.size());
  for (const Parameter* p : params) {
    CheckpointTensor t{p->name, p->value.shape(), {}};
    t.data.reserve(p->value.size());
    for (double v : p->value.values()) t.data.push_back(static_cast<float>(v));
    ck.tensors.push_back(std::move(t));
  }
  return ck;
}

void restore_checkpoint(const Checkpoint& checkpoint, const ParamList& params) {
  std::map<std::string, const CheckpointTensor*> by_name;
  for (const auto& t : checkpoint.tensors) by_name[t.name] = &t;
  if (by_name.size() != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(by_name.size()) + " tensors, model expects " +
                      std::to_string(params.size()));
  }
  for (Parameter* p : params) {
    const auto it = by_name.find(p->name);
    if (it == by_name.end()) throw FormatError("checkpoint lacks parameter '" + p->name + "'");
    const CheckpointTensor& t = *it->second;
    if (t.shape != p->value.shape()) {
      throw FormatError("checkpoint parameter '" + p->name + "' has shape " + shape_string(t.shape) +
                        ", model expects " + shape_string(p->value.shape()));
    }
    for (std::size_t i = 0; i < t.data.size(); ++i) p->value[i] = static_cast<double>(t.data[i]);
  }
}

void quantize_to_checkpoint_precision(const ParamList& params) {
  for (Parameter* p : params) {
    for (double& v : p->value.values()) v = static_cast<double>(static_cast<float>(v));
  }
}

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ck) {
  std::vector<unsigned char> payload;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : ck.tensors) {
    if (shape_product(t.shape) != t.data.size()) {
      throw DimensionError("checkpoint tensor '" + t.name + "' shape " + shape_string(t.shape) + " does not match " +
                           std::to_string(t.data.size()) + " values");
    }
    tensors.push_back({{"name", t.name}, {"shape", t.shape}});
    for (float v : t.data) detail::put_f32(payload, v);
  }
  const nlohmann::json header = {{"variant", ck.variant},
                                 {"model", ck.model},
                                 {"metadata", ck.metadata},
                                 {"tensors", tensors},
                                 {"payload_bytes", payload.size()},
                                 {"payload_crc32", crc_of(payload.data(), payload.size())}};
  const std::string text = header.dump();
  std::vector<unsigned char> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes) {
  detail::ByteReader in(bytes, "checkpoint");
  if (in.str(4, "magic") != std::string(kCheckpointMagic, 4)) {
    throw FormatError("checkpoint: bad magic at offset 0 (expected \"ATNM\")");
  }
  const std::uint32_t version = in.u32("version");
  if (version != kCheckpointVersion) in.fail("unsupported version " + std::to_string(version));
  const std::uint32_t header_len = in.u32("header length");
  const std::size_t header_offset = in.offset();
  const std::string text = in.str(header_len, "header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint: malformed JSON header at offset " + std::to_string(header_offset) + ": " +
                      e.what());
  }
  Checkpoint ck;
  try {
    ck.variant = header.at("variant").get<std::string>();
    ck.model = header.at("model");
    ck.metadata = header.at("metadata");
    const std::size_t payload_offset = in.offset();
    if (header.at("payload_bytes").get<std::size_t>() != in.remaining()) {
      in.fail("payload is " + std::to_string(in.remaining()) + " bytes, header declares " +
              std::to_string(header.at("payload_bytes").get<std::size_t>()));
    }
    const std::uint32_t crc = crc_of(bytes.data() + payload_offset, in.remaining());
    if (crc != header.at("payload_crc32").get<std::uint32_t>()) in.fail("payload checksum mismatch");
    for (const auto& entry : header.at("tensors")) {
      CheckpointTensor t{entry.at("name").get<std::string>(), entry.at("shape").get<std::vector<std::size_t>>(), {}};
      const std::size_t n = shape_product(t.shape);
      in.need(4 * n, "tensor payload");
      t.data.resize(n);
      for (std::size_t i = 0; i < n; ++i) t.data[i] = in.f32("tensor value");
      ck.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad header field: ") + e.what());
  }
  if (in.remaining() != 0) in.fail("trailing bytes after tensor payload");
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  detail::write_file_bytes(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(detail::read_file_bytes(path)); }

}  // namespace atnm
