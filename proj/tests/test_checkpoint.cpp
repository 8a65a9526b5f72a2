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

#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "atnm/binary_io.hpp"
#include "atnm/error.hpp"
#include "atnm/nn/checkpoint.hpp"
#include "atnm/nn/linear.hpp"
#include "test_util.hpp"

using namespace atnm;

namespace {

struct TwoLayers {
  Linear a;
  Linear b;
  explicit TwoLayers(Rng& rng) : a("a", 3, 4, rng), b("b", 4, 2, rng) {
    test::randomize(a.bias, rng);
    test::randomize(b.bias, rng);
  }
  ParamList params() {
    ParamList out;
    a.collect(out);
    b.collect(out);
    return out;
  }
};

Checkpoint sample_checkpoint(std::uint64_t seed) {
  Rng rng(seed);
  TwoLayers net(rng);
  return capture_checkpoint("AttTF", {{"frames", 16}}, {{"seed", seed}, {"val_macro_f1", 0.5}}, net.params());
}

bool message_has(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("checkpoint") {
  TEST_CASE("encode/decode round trip is exact at single precision") {
    const Checkpoint ck = sample_checkpoint(1);
    const auto bytes = encode_checkpoint(ck);
    CHECK(std::memcmp(bytes.data(), "ATNM", 4) == 0);
    const Checkpoint back = decode_checkpoint(bytes);
    CHECK(back.variant == "AttTF");
    CHECK(back.model == ck.model);
    CHECK(back.metadata == ck.metadata);
    REQUIRE(back.tensors.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(back.tensors[i].name == ck.tensors[i].name);
      CHECK(back.tensors[i].shape == ck.tensors[i].shape);
      CHECK(back.tensors[i].data == ck.tensors[i].data);
    }
    CHECK(encode_checkpoint(back) == bytes);
  }

  TEST_CASE("payload is little-endian f32 in header order") {
    const Checkpoint ck = sample_checkpoint(2);
    const auto bytes = encode_checkpoint(ck);
    std::size_t floats = 0;
    for (const auto& t : ck.tensors) floats += t.data.size();
    const std::size_t payload_start = bytes.size() - 4 * floats;
    float first;
    const unsigned char le[4] = {bytes[payload_start], bytes[payload_start + 1], bytes[payload_start + 2],
                                 bytes[payload_start + 3]};
    std::uint32_t bits = le[0] | (le[1] << 8) | (le[2] << 16) | (static_cast<std::uint32_t>(le[3]) << 24);
    std::memcpy(&first, &bits, 4);
    CHECK(first == ck.tensors.front().data.front());
  }

  TEST_CASE("restore then capture reproduces the same bytes") {
    const Checkpoint ck = sample_checkpoint(3);
    Rng rng(99);
    TwoLayers other(rng);
    restore_checkpoint(ck, other.params());
    const Checkpoint again = capture_checkpoint(ck.variant, ck.model, ck.metadata, other.params());
    CHECK(encode_checkpoint(again) == encode_checkpoint(ck));
  }

  TEST_CASE("quantizing matches what a checkpoint stores") {
    Rng rng(4);
    TwoLayers net(rng);
    const Checkpoint ck = capture_checkpoint("AttTF", {}, {}, net.params());
    quantize_to_checkpoint_precision(net.params());
    Rng rng2(5);
    TwoLayers restored(rng2);
    restore_checkpoint(ck, restored.params());
    CHECK(restored.a.weight.value == net.a.weight.value);
    CHECK(restored.b.bias.value == net.b.bias.value);
  }

  TEST_CASE("corruption is reported as a format error with an offset") {
    const auto good = encode_checkpoint(sample_checkpoint(6));

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bad_magic), FormatError);

    auto flipped = good;
    flipped.back() ^= 0x40;
    try {
      decode_checkpoint(flipped);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(message_has(e, "checksum"));
      CHECK(message_has(e, "offset"));
    }

    auto truncated = good;
    truncated.resize(good.size() - 3);
    try {
      decode_checkpoint(truncated);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(message_has(e, "offset"));
    }

    auto short_header = good;
    short_header.resize(10);
    CHECK_THROWS_AS(decode_checkpoint(short_header), FormatError);

    auto version = good;
    version[4] = 9;
    CHECK_THROWS_AS(decode_checkpoint(version), FormatError);
  }

  TEST_CASE("shape mismatch and missing names on restore") {
    const Checkpoint ck = sample_checkpoint(7);
    Rng rng(8);
    Linear a("a", 3, 5, rng);
    Linear b("b", 4, 2, rng);
    ParamList wrong_shape;
    a.collect(wrong_shape);
    b.collect(wrong_shape);
    CHECK_THROWS_AS(restore_checkpoint(ck, wrong_shape), FormatError);

    Linear c("c", 3, 4, rng);
    ParamList wrong_name;
    c.collect(wrong_name);
    b.collect(wrong_name);
    CHECK_THROWS_AS(restore_checkpoint(ck, wrong_name), FormatError);
  }

  TEST_CASE("file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "atnm_ck_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "model.atnm").string();
    const Checkpoint ck = sample_checkpoint(9);
    save_checkpoint(ck, path);
    CHECK(encode_checkpoint(load_checkpoint(path)) == encode_checkpoint(ck));
    CHECK_THROWS_AS(load_checkpoint((dir / "missing.atnm").string()), FormatError);
    std::filesystem::remove_all(dir);
  }
}
