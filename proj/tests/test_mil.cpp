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

#include <algorithm>
#include <cmath>

#include "atnm/error.hpp"
#include "atnm/features/tiling.hpp"
#include "atnm/loss/losses.hpp"
#include "atnm/mil/attention_mic.hpp"
#include "atnm/nn/activation.hpp"
#include "atnm/nn/gradcheck.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace atnm;
using atnm::test::random_tensor;

namespace {

InstanceGrid random_grid(std::size_t T, std::size_t F, std::size_t D, Rng& rng) {
  return {T, F, random_tensor({T * F, D}, rng)};
}

ModelConfig tiny_config(const std::string& variant) {
  ModelConfig cfg;
  cfg.variant = variant;
  cfg.frames = 8;
  cfg.bins = 6;
  cfg.classes = 3;
  cfg.time_tiles = 4;
  cfg.freq_tiles = 2;
  cfg.patch_hidden = 7;
  cfg.feature_dim = 5;
  return cfg;
}

}  // namespace

TEST_SUITE("mil") {
  TEST_CASE("embedding with zero layers is the skip identity") {
    Rng rng(0);
    InstanceEmbedding embed(6, rng);
    for (Linear* fc : {&embed.fc1, &embed.fc2, &embed.fc3}) fc->weight.value.fill(0.0);
    const InstanceGrid u = random_grid(3, 2, 6, rng);
    CHECK(embed_instances(u, embed).features == u.features);
  }

  TEST_CASE("identical instances embed identically") {
    Rng rng(1);
    InstanceEmbedding embed(4, rng);
    Tensor u = Tensor::matrix(2, 4);
    for (std::size_t d = 0; d < 4; ++d) u.at(0, d) = u.at(1, d) = 0.3 * static_cast<double>(d) - 0.4;
    const Tensor v = embed.forward(u, nullptr);
    for (std::size_t d = 0; d < 4; ++d) CHECK(v.at(0, d) == v.at(1, d));
  }

  TEST_CASE("embedding finite differences on a 3x2 grid, 5 seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      InstanceEmbedding embed(6, rng);
      ParamList params;
      embed.collect(params);
      test::randomize(params, rng);
      Parameter u = test::input_param("u", random_tensor({6, 6}, rng));
      params.push_back(&u);
      const Tensor w = random_tensor({6, 6}, rng);
      const auto report = finite_diff_check(params, [&](bool grad) {
        InstanceEmbedding::Cache cache;
        const Tensor v = embed.forward(u.value, &cache);
        if (grad) u.grad = embed.backward(u.value, cache, w);
        return test::weighted_sum(v, w);
      });
      CHECK(report.max_rel_error < 1e-5);
    }
  }

  TEST_CASE("frequency identifier is one-hot at the band index") {
    Rng rng(2);
    const InstanceGrid v = random_grid(3, 4, 5, rng);
    const InstanceGrid out = append_freq_id(v);
    CHECK(out.dim() == 9);
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t f = 0; f < 4; ++f) {
        const auto row = out.features.row_span(out.index(t, f));
        for (std::size_t d = 0; d < 5; ++d) CHECK(row[d] == v.features.at(v.index(t, f), d));
        double sum = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
          CHECK(row[5 + k] == (k == f ? 1.0 : 0.0));
          sum += row[5 + k];
        }
        CHECK(sum == 1.0);
      }
    }
    const InstanceGrid single = append_freq_id(random_grid(5, 1, 3, rng));
    for (std::size_t n = 0; n < 5; ++n) CHECK(single.features.at(n, 3) == 1.0);
  }

  TEST_CASE("constant raw attention averages the instance predictions") {
    Rng rng(3);
    AttentionHead head(4, 3, rng);
    head.attention.weight.value.fill(0.0);
    const InstanceGrid v = random_grid(3, 2, 4, rng);
    const AttentionOutput out = attend_and_aggregate(v, head);
    for (std::size_t c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (std::size_t n = 0; n < 6; ++n) {
        CHECK(out.attention.at(n, c) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        mean += out.instance_preds.at(n, c) / 6.0;
      }
      CHECK(out.final_pred[c] == doctest::Approx(mean).epsilon(1e-14));
    }
  }

  TEST_CASE("one instance gets all the attention") {
    Rng rng(4);
    AttentionHead head(4, 3, rng);
    const AttentionOutput out = attend_and_aggregate(random_grid(1, 1, 4, rng), head);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(out.attention.at(0, c) == 1.0);
      CHECK(out.final_pred[c] == out.instance_preds.at(0, c));
    }
  }

  TEST_CASE("six instances, three classes match the direct-sum oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      AttentionHead head(5, 3, rng);
      ParamList params;
      head.collect(params);
      test::randomize(params, rng, 1.0);
      const InstanceGrid v = random_grid(3, 2, 5, rng);
      const auto expect = oracle::attention(v.features, head);
      const AttentionOutput out = attend_and_aggregate(v, head);
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(out.final_pred[c] - expect[c]) < 1e-12);
    }
  }

  TEST_CASE("normalisation is not shift-invariant in the attention logits") {
    Rng rng(5);
    AttentionHead head(4, 2, rng);
    ParamList params;
    head.collect(params);
    test::randomize(params, rng, 1.0);
    const InstanceGrid v = random_grid(2, 2, 4, rng);
    const AttentionOutput before = attend_and_aggregate(v, head);
    for (double& b : head.attention.bias.value.values()) b += 2.0;
    const AttentionOutput after = attend_and_aggregate(v, head);
    CHECK(std::abs(before.attention.at(0, 0) - after.attention.at(0, 0)) > 1e-6);
    const auto expect = oracle::attention(v.features, head);
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(after.final_pred[c] - expect[c]) < 1e-12);
  }

  TEST_CASE("an empty grid is a dimension error") {
    Rng rng(6);
    AttentionHead head(4, 2, rng);
    CHECK_THROWS_AS(attend_and_aggregate(InstanceGrid{}, head), DimensionError);
  }

  TEST_CASE("attention is a per-class simplex and the prediction a convex combination") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      AttentionHead head(6, 4, rng);
      ParamList params;
      head.collect(params);
      test::randomize(params, rng, 3.0);
      const InstanceGrid v{5, 3, random_tensor({15, 6}, rng, 5.0)};
      const AttentionOutput out = attend_and_aggregate(v, head);
      for (std::size_t c = 0; c < 4; ++c) {
        double sum = 0.0;
        double lo = 1.0, hi = 0.0;
        for (std::size_t n = 0; n < 15; ++n) {
          CHECK(out.attention.at(n, c) >= 0.0);
          sum += out.attention.at(n, c);
          lo = std::min(lo, out.instance_preds.at(n, c));
          hi = std::max(hi, out.instance_preds.at(n, c));
        }
        CHECK(std::abs(sum - 1.0) < 1e-6);
        CHECK(out.final_pred[c] >= lo);
        CHECK(out.final_pred[c] <= hi);
      }
    }
  }

  TEST_CASE("attention head finite differences, 5 seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      AttentionHead head(5, 3, rng);
      ParamList params;
      head.collect(params);
      test::randomize(params, rng, 1.0);
      Parameter v = test::input_param("v", random_tensor({6, 5}, rng));
      params.push_back(&v);
      const std::vector<double> w{0.7, -1.3, 0.4};
      const auto report = finite_diff_check(params, [&](bool grad) {
        AttentionHead::Cache cache;
        const AttentionOutput out = head.forward(v.value, &cache);
        if (grad) v.grad = head.backward(v.value, out, cache, w);
        double s = 0.0;
        for (std::size_t c = 0; c < 3; ++c) s += w[c] * out.final_pred[c];
        return s;
      });
      CHECK(report.max_rel_error < 1e-5);
    }
  }

  TEST_CASE("temporal attention with one band is plain attention") {
    Rng rng(7);
    InstanceEmbedding embed(4, rng);
    AttentionHead head(4, 3, rng);
    const InstanceGrid u = random_grid(5, 1, 4, rng);
    const AttentionOutput a = attT_forward(u, embed, head);
    const AttentionOutput b = attend_and_aggregate(embed_instances(u, embed), head);
    CHECK(a.final_pred == b.final_pred);
    CHECK(a.attention == b.attention);
  }

  TEST_CASE("temporal attention equals full attention when bands are identical") {
    Rng rng(8);
    InstanceEmbedding embed(4, rng);
    AttentionHead head(4, 3, rng);
    const InstanceGrid row = random_grid(5, 1, 4, rng);
    InstanceGrid u{5, 3, Tensor::matrix(15, 4)};
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t f = 0; f < 3; ++f) {
        for (std::size_t d = 0; d < 4; ++d) u.features.at(u.index(t, f), d) = row.features.at(t, d);
      }
    }
    const AttentionOutput temporal = attT_forward(u, embed, head);
    const AttentionOutput full = attend_and_aggregate(embed_instances(u, embed), head);
    CHECK(temporal.attention.rows() == 5);
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(temporal.final_pred[c] - full.final_pred[c]) < 1e-12);
  }

  TEST_CASE("temporal attention over the default geometry has 60 instances") {
    ModelConfig cfg;
    cfg.variant = "AttT";
    cfg.patch_hidden = 16;
    cfg.feature_dim = 8;
    Rng rng(9);
    AttentionMic model(cfg, rng);
    const auto trace = model.forward(test::random_spectrogram(998, 64, rng));
    CHECK(trace.attention.attention.rows() == 60);
    CHECK(trace.attention.attention.cols() == 20);
  }

  TEST_CASE("FC baseline: identical instances pool to themselves, outputs in (0,1)") {
    Rng rng(10);
    InstanceEmbedding embed(6, rng);
    Linear classifier("classifier", 6, 20, rng);
    test::randomize(classifier.bias, rng);
    const Tensor one = random_tensor({1, 6}, rng);
    InstanceGrid u{4, 2, Tensor::matrix(8, 6)};
    for (std::size_t n = 0; n < 8; ++n) {
      for (std::size_t d = 0; d < 6; ++d) u.features.at(n, d) = one[d];
    }
    const auto pred = fc_baseline_forward(u, embed, classifier);
    const auto direct = activate(classifier.forward(embed.forward(one, nullptr)), Activation::Sigmoid);
    REQUIRE(pred.size() == 20);
    for (std::size_t c = 0; c < 20; ++c) {
      CHECK(std::abs(pred[c] - direct[c]) < 1e-15);
      CHECK(pred[c] > 0.0);
      CHECK(pred[c] < 1.0);
    }
  }

  TEST_CASE("feature-level finite differences for every variant, 5 seeds") {
    for (const std::string variant : {"AttTF", "AttTFid", "AttT", "FC"}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        AttentionMic model(tiny_config(variant), rng);
        ParamList params;
        model.embedding.collect(params);
        if (variant == "FC") model.classifier.collect(params);
        else model.head.collect(params);
        test::randomize(params, rng);
        Parameter u = test::input_param("u", random_tensor({8, 5}, rng));
        params.push_back(&u);
        const std::vector<double> w{0.5, -0.8, 1.1};
        const auto report = finite_diff_check(params, [&](bool grad) {
          const auto tr = model.forward_from_features({4, 2, u.value});
          if (grad) u.grad = model.backward_to_features(tr, w);
          double s = 0.0;
          for (std::size_t c = 0; c < 3; ++c) s += w[c] * tr.prediction[c];
          return s;
        });
        INFO(variant << " seed " << seed << " worst " << report.worst_param);
        CHECK(report.max_rel_error < 1e-5);
      }
    }
  }

  TEST_CASE("end-to-end loss finite differences on a 4x2 grid, 5 seeds") {
    for (const std::string variant : {"AttTF", "AttTFid", "AttT", "FC"}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        AttentionMic model(tiny_config(variant), rng);
        const ParamList params = model.parameters();
        test::randomize(params, rng);
        const LabeledExample ex = test::random_example(8, 6, 3, rng);
        const Objective objective;
        const auto report = finite_diff_check(params, [&](bool grad) {
          if (grad) return model.accumulate(ex, objective, 1.0, rng).loss;
          return classification_loss(objective, model.predict(ex.spectrogram, rng), ex.labels, ex.known).value;
        });
        INFO(variant << " seed " << seed << " worst " << report.worst_param);
        CHECK(report.max_rel_error < 1e-4);
      }
    }
  }

  TEST_CASE("forward is deterministic and rejects wrong geometry") {
    Rng rng(11);
    AttentionMic model(tiny_config("AttTFid"), rng);
    const Spectrogram x = test::random_spectrogram(8, 6, rng);
    CHECK(model.predict(x, rng) == model.predict(x, rng));
    CHECK_THROWS_AS(model.predict(Spectrogram(9, 6), rng), DimensionError);
  }

  TEST_CASE("parameter names are unique") {
    Rng rng(12);
    for (const std::string variant : {"AttTF", "AttTFid", "AttT", "FC"}) {
      AttentionMic model(tiny_config(variant), rng);
      CHECK_NOTHROW(check_unique_names(model.parameters()));
    }
  }
}
