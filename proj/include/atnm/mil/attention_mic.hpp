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

#include "atnm/features/patch_embed.hpp"
#include "atnm/features/tiling.hpp"
#include "atnm/model.hpp"
#include "atnm/nn/linear.hpp"

namespace atnm {

/// Three D -> D layers with ReLU between them and a skip from input to
/// output: v = fc3(relu(fc2(relu(fc1(u))))) + u.
class InstanceEmbedding {
 public:
  struct Cache {
    Tensor h1;
    Tensor h2;
  };

  InstanceEmbedding() = default;
  InstanceEmbedding(std::size_t dim, Rng& rng);

  Tensor forward(const Tensor& u, Cache* cache) const;
  Tensor backward(const Tensor& u, const Cache& cache, const Tensor& dv);
  void collect(ParamList& out);

  Linear fc1, fc2, fc3;
};

InstanceGrid embed_instances(const InstanceGrid& u, const InstanceEmbedding& embedding);

/// Appends the one-hot frequency identifier of each instance (length F').
InstanceGrid append_freq_id(const InstanceGrid& v);

struct AttentionOutput {
  Tensor instance_preds;  // [N x C], sigmoid(f_inst(v))
  Tensor attention;       // [N x C], columns sum to 1
  std::vector<double> final_pred;
};

/// Per-class instance predictions and attention; the recording prediction is
/// the attention-weighted sum of instance predictions. Raw attention is
/// sigmoid(f_att(v)), normalised by its sum over all instances.
class AttentionHead {
 public:
  struct Cache {
    Tensor raw_attention;
    std::vector<double> attention_sums;
  };

  AttentionHead() = default;
  AttentionHead(std::size_t dim, std::size_t classes, Rng& rng);

  AttentionOutput forward(const Tensor& v, Cache* cache) const;
  /// dv from the gradient of the final prediction.
  Tensor backward(const Tensor& v, const AttentionOutput& out, const Cache& cache, std::span<const double> d_final);
  void collect(ParamList& out);

  Linear instance;
  Linear attention;
};

AttentionOutput attend_and_aggregate(const InstanceGrid& v, const AttentionHead& head);

/// Mean over frequency bands at each time step: [T'F' x D] -> [T' x D].
InstanceGrid pool_frequency(const InstanceGrid& u);

/// AttTF, AttTFid, AttT and the FC baseline.
class AttentionMic final : public Model {
 public:
  /// Everything one forward pass produced, kept for backward.
  struct Trace {
    TileGrid tiles;
    PatchEmbedding::Cache patch;
    InstanceGrid features;  // u, after frequency pooling for AttT
    InstanceEmbedding::Cache embed;
    InstanceGrid embedded;  // v, with identifier appended for AttTFid
    AttentionHead::Cache head;
    AttentionOutput attention;
    Tensor pooled;  // FC baseline only, [1 x D]
    std::vector<double> prediction;
  };

  AttentionMic(ModelConfig cfg, Rng& rng);

  const ModelConfig& config() const override { return cfg_; }
  ParamList parameters() override;
  bool stochastic() const override { return false; }
  std::vector<double> predict(const Spectrogram& x, Rng& rng) const override;
  ExampleStats accumulate(const LabeledExample& example, const Objective& objective, double scale, Rng& rng) override;

  Trace forward(const Spectrogram& x) const;
  /// Backward from d(loss)/d(prediction).
  void backward(const Trace& trace, std::span<const double> d_pred);

  /// Instance features straight from the tiles (embed_tiles).
  InstanceGrid embed_tiles(const TileGrid& tiles) const { return patch.forward(tiles, nullptr); }

  /// Head over already-extracted instance features, no patch embedding; the
  /// path attT_forward / fc_baseline_forward / AttTF share after features.
  Trace forward_from_features(const InstanceGrid& u) const;
  /// Backward counterpart; returns dL/du.
  Tensor backward_to_features(const Trace& trace, std::span<const double> d_pred);

  PatchEmbedding patch;
  InstanceEmbedding embedding;
  AttentionHead head;  // Att* variants
  Linear classifier;   // FC variant

 private:
  bool temporal_only() const { return cfg_.variant == "AttT"; }
  bool with_identifier() const { return cfg_.variant == "AttTFid"; }
  bool fc_baseline() const { return cfg_.variant == "FC"; }

  ModelConfig cfg_;
};

}  // namespace atnm

namespace atnm {

/// Temporal-only attention: frequency bands mean-pooled per time step, then
/// embedding and attention over the T' remaining instances.
AttentionOutput attT_forward(const InstanceGrid& u, const InstanceEmbedding& embedding, const AttentionHead& head);

/// Baseline without attention: mean of the embedded instances through one
/// linear layer and a sigmoid.
std::vector<double> fc_baseline_forward(const InstanceGrid& u, const InstanceEmbedding& embedding,
                                        const Linear& classifier);

}  // namespace atnm
