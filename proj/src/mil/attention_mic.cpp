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

#include "atnm/mil/attention_mic.hpp"

#include <algorithm>

#include "atnm/error.hpp"
#include "atnm/nn/activation.hpp"

namespace atnm {

InstanceEmbedding::InstanceEmbedding(std::size_t dim, Rng& rng)
    : fc1("embed.fc1", dim, dim, rng), fc2("embed.fc2", dim, dim, rng), fc3("embed.fc3", dim, dim, rng) {}

Tensor InstanceEmbedding::forward(const Tensor& u, Cache* cache) const {
  Tensor h1 = activate(fc1.forward(u), Activation::Relu);
  Tensor h2 = activate(fc2.forward(h1), Activation::Relu);
  Tensor v = fc3.forward(h2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += u[i];
  if (cache != nullptr) {
    cache->h1 = std::move(h1);
    cache->h2 = std::move(h2);
  }
  return v;
}

Tensor InstanceEmbedding::backward(const Tensor& u, const Cache& cache, const Tensor& dv) {
  const Tensor dh2 = activate_backward(cache.h2, fc3.backward(cache.h2, dv), Activation::Relu);
  const Tensor dh1 = activate_backward(cache.h1, fc2.backward(cache.h1, dh2), Activation::Relu);
  Tensor du = fc1.backward(u, dh1);
  for (std::size_t i = 0; i < du.size(); ++i) du[i] += dv[i];
  return du;
}

void InstanceEmbedding::collect(ParamList& out) {
  fc1.collect(out);
  fc2.collect(out);
  fc3.collect(out);
}

InstanceGrid embed_instances(const InstanceGrid& u, const InstanceEmbedding& embedding) {
  return {u.time_steps, u.freq_bands, embedding.forward(u.features, nullptr)};
}

InstanceGrid append_freq_id(const InstanceGrid& v) {
  const std::size_t D = v.dim();
  const std::size_t F = v.freq_bands;
  InstanceGrid out{v.time_steps, F, Tensor::matrix(v.instances(), D + F)};
  for (std::size_t t = 0; t < v.time_steps; ++t) {
    for (std::size_t f = 0; f < F; ++f) {
      const std::size_t i = v.index(t, f);
      const auto src = v.features.row_span(i);
      auto dst = out.features.row_span(i);
      std::copy(src.begin(), src.end(), dst.begin());
      dst[D + f] = 1.0;
    }
  }
  return out;
}

AttentionHead::AttentionHead(std::size_t dim, std::size_t classes, Rng& rng)
    : instance("head.instance", dim, classes, rng), attention("head.attention", dim, classes, rng) {}

AttentionOutput AttentionHead::forward(const Tensor& v, Cache* cache) const {
  if (v.rows() == 0) throw DimensionError("attention needs at least one instance");
  AttentionOutput out;
  out.instance_preds = activate(instance.forward(v), Activation::Sigmoid);
  Tensor raw = activate(attention.forward(v), Activation::Sigmoid);
  const std::size_t N = raw.rows(), C = raw.cols();
  std::vector<double> sums(C, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t c = 0; c < C; ++c) sums[c] += raw.at(i, c);
  }
  out.attention = Tensor::matrix(N, C);
  out.final_pred.assign(C, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t c = 0; c < C; ++c) {
      const double alpha = raw.at(i, c) / sums[c];
      out.attention.at(i, c) = alpha;
      out.final_pred[c] += alpha * out.instance_preds.at(i, c);
    }
  }
  // Rounding can push the weighted sum an ulp past the instance range.
  for (std::size_t c = 0; c < C; ++c) {
    double lo = out.instance_preds.at(0, c), hi = lo;
    for (std::size_t i = 1; i < N; ++i) {
      lo = std::min(lo, out.instance_preds.at(i, c));
      hi = std::max(hi, out.instance_preds.at(i, c));
    }
    out.final_pred[c] = std::clamp(out.final_pred[c], lo, hi);
  }
  if (cache != nullptr) {
    cache->raw_attention = std::move(raw);
    cache->attention_sums = std::move(sums);
  }
  return out;
}

Tensor AttentionHead::backward(const Tensor& v, const AttentionOutput& out, const Cache& cache,
                               std::span<const double> d_final) {
  const std::size_t N = out.attention.rows(), C = out.attention.cols();
  if (d_final.size() != C) throw DimensionError("attention backward: gradient length differs from class count");
  Tensor d_inst = Tensor::matrix(N, C);
  Tensor d_raw = Tensor::matrix(N, C);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t c = 0; c < C; ++c) {
      const double g = d_final[c];
      d_inst.at(i, c) = g * out.attention.at(i, c);
      // d alpha_ic / d raw_kc = (delta_ik - alpha_ic) / S_c
      d_raw.at(i, c) = g * (out.instance_preds.at(i, c) - out.final_pred[c]) / cache.attention_sums[c];
    }
  }
  Tensor dv = instance.backward(v, activate_backward(out.instance_preds, d_inst, Activation::Sigmoid));
  const Tensor dv_att = attention.backward(v, activate_backward(cache.raw_attention, d_raw, Activation::Sigmoid));
  for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += dv_att[i];
  return dv;
}

void AttentionHead::collect(ParamList& out) {
  instance.collect(out);
  attention.collect(out);
}

AttentionOutput attend_and_aggregate(const InstanceGrid& v, const AttentionHead& head) {
  if (v.instances() == 0 || v.features.rows() != v.instances()) {
    throw DimensionError("attend_and_aggregate: grid has no instances");
  }
  return head.forward(v.features, nullptr);
}

InstanceGrid pool_frequency(const InstanceGrid& u) {
  const std::size_t D = u.dim();
  InstanceGrid out{u.time_steps, 1, Tensor::matrix(u.time_steps, D)};
  const double inv = 1.0 / static_cast<double>(u.freq_bands);
  for (std::size_t t = 0; t < u.time_steps; ++t) {
    auto dst = out.features.row_span(t);
    for (std::size_t f = 0; f < u.freq_bands; ++f) {
      const auto src = u.features.row_span(u.index(t, f));
      for (std::size_t d = 0; d < D; ++d) dst[d] += src[d];
    }
    for (double& x : dst) x *= inv;
  }
  return out;
}

namespace {

Tensor mean_rows(const Tensor& m) {
  Tensor out = Tensor::matrix(1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m.at(r, c);
  }
  for (double& x : out.values()) x /= static_cast<double>(m.rows());
  return out;
}

}  // namespace

AttentionOutput attT_forward(const InstanceGrid& u, const InstanceEmbedding& embedding, const AttentionHead& head) {
  return attend_and_aggregate(embed_instances(pool_frequency(u), embedding), head);
}

std::vector<double> fc_baseline_forward(const InstanceGrid& u, const InstanceEmbedding& embedding,
                                        const Linear& classifier) {
  const Tensor pooled = mean_rows(embedding.forward(u.features, nullptr));
  const Tensor y = activate(classifier.forward(pooled), Activation::Sigmoid);
  return y.storage();
}

AttentionMic::AttentionMic(ModelConfig cfg, Rng& rng) : cfg_(resolve_model_config(std::move(cfg))) {
  if (!is_mil_variant(cfg_.variant)) throw ConfigError("'" + cfg_.variant + "' is not an AttentionMIC variant");
  const std::size_t tile_cells = (cfg_.frames / cfg_.time_tiles) * (cfg_.bins / cfg_.freq_tiles);
  patch = PatchEmbedding(tile_cells, cfg_.freq_tiles, cfg_.patch_hidden, cfg_.feature_dim, rng);
  embedding = InstanceEmbedding(cfg_.feature_dim, rng);
  if (fc_baseline()) {
    classifier = Linear("classifier", cfg_.feature_dim, cfg_.classes, rng);
  } else {
    const std::size_t head_dim = cfg_.feature_dim + (with_identifier() ? cfg_.freq_tiles : 0);
    head = AttentionHead(head_dim, cfg_.classes, rng);
  }
}

ParamList AttentionMic::parameters() {
  ParamList out;
  patch.collect(out);
  embedding.collect(out);
  if (fc_baseline()) classifier.collect(out);
  else head.collect(out);
  return out;
}

AttentionMic::Trace AttentionMic::forward_from_features(const InstanceGrid& u) const {
  Trace tr;
  tr.features = temporal_only() ? pool_frequency(u) : u;
  const InstanceGrid& feats = tr.features;
  InstanceGrid v{feats.time_steps, feats.freq_bands, embedding.forward(feats.features, &tr.embed)};
  if (fc_baseline()) {
    tr.pooled = mean_rows(v.features);
    tr.prediction = activate(classifier.forward(tr.pooled), Activation::Sigmoid).storage();
    tr.embedded = std::move(v);
    return tr;
  }
  tr.embedded = with_identifier() ? append_freq_id(v) : std::move(v);
  tr.attention = head.forward(tr.embedded.features, &tr.head);
  tr.prediction = tr.attention.final_pred;
  return tr;
}

AttentionMic::Trace AttentionMic::forward(const Spectrogram& x) const {
  if (x.frames != cfg_.frames || x.bins != cfg_.bins) {
    throw DimensionError("model expects " + std::to_string(cfg_.frames) + "x" + std::to_string(cfg_.bins) +
                         " spectrograms, got " + std::to_string(x.frames) + "x" + std::to_string(x.bins));
  }
  TileGrid tiles = tile_spectrogram(x, cfg_.time_tiles, cfg_.freq_tiles);
  PatchEmbedding::Cache patch_cache;
  const InstanceGrid u = patch.forward(tiles, &patch_cache);
  Trace tr = forward_from_features(u);
  tr.tiles = std::move(tiles);
  tr.patch = std::move(patch_cache);
  return tr;
}

Tensor AttentionMic::backward_to_features(const Trace& tr, std::span<const double> d_pred) {
  Tensor dv;
  if (fc_baseline()) {
    const Tensor y = Tensor::row(tr.prediction);
    const Tensor dy = activate_backward(y, Tensor::row({d_pred.begin(), d_pred.end()}), Activation::Sigmoid);
    const Tensor d_pooled = classifier.backward(tr.pooled, dy);
    const std::size_t N = tr.embedded.features.rows();
    dv = Tensor(tr.embedded.features.shape());
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t d = 0; d < d_pooled.size(); ++d) dv.at(i, d) = d_pooled[d] / static_cast<double>(N);
    }
  } else {
    const Tensor dv_head = head.backward(tr.embedded.features, tr.attention, tr.head, d_pred);
    if (with_identifier()) {
      const std::size_t D = cfg_.feature_dim;
      dv = Tensor::matrix(dv_head.rows(), D);
      for (std::size_t i = 0; i < dv_head.rows(); ++i) {
        std::copy_n(dv_head.row_span(i).begin(), D, dv.row_span(i).begin());
      }
    } else {
      dv = dv_head;
    }
  }
  Tensor du = embedding.backward(tr.features.features, tr.embed, dv);
  if (!temporal_only()) return du;
  // Undo the frequency mean: every band receives 1/F' of its time step's gradient.
  const std::size_t F = cfg_.freq_tiles;
  Tensor du_full = Tensor::matrix(du.rows() * F, du.cols());
  for (std::size_t t = 0; t < du.rows(); ++t) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t d = 0; d < du.cols(); ++d) du_full.at(t * F + f, d) = du.at(t, d) / static_cast<double>(F);
    }
  }
  return du_full;
}

void AttentionMic::backward(const Trace& tr, std::span<const double> d_pred) {
  patch.backward(tr.tiles, tr.patch, backward_to_features(tr, d_pred));
}

std::vector<double> AttentionMic::predict(const Spectrogram& x, Rng& /*rng*/) const { return forward(x).prediction; }

ExampleStats AttentionMic::accumulate(const LabeledExample& example, const Objective& objective, double scale,
                                      Rng& /*rng*/) {
  const Trace tr = forward(example.spectrogram);
  LossValue loss = classification_loss(objective, tr.prediction, example.labels, example.known);
  for (double& g : loss.grad) g *= scale;
  backward(tr, loss.grad);
  return {loss.value, loss.value, 0.0, 0.0, 0.0};
}

}  // namespace atnm
