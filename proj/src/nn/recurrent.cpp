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

#include "atnm/nn/recurrent.hpp"

#include <cmath>

#include "atnm/error.hpp"
#include "atnm/nn/activation.hpp"

namespace atnm {

CoreKind parse_core(std::string_view name) {
  if (name == "gru") return CoreKind::Gru;
  if (name == "rnn") return CoreKind::Rnn;
  throw ConfigError("unknown core '" + std::string(name) + "' (expected gru|rnn)");
}

std::string_view core_name(CoreKind kind) { return kind == CoreKind::Gru ? "gru" : "rnn"; }

void RecurrentCell::check_inputs(const Tensor& h_prev, const Tensor& x) const {
  if (h_prev.rank() != 2 || h_prev.cols() != hidden_size_) {
    throw DimensionError("recurrent cell: hidden state " + shape_string(h_prev.shape()) +
                         " does not match hidden size " + std::to_string(hidden_size_));
  }
  if (x.rank() != 2 || x.cols() != input_size_ || x.rows() != h_prev.rows()) {
    throw DimensionError("recurrent cell: input " + shape_string(x.shape()) + " does not match input size " +
                         std::to_string(input_size_) + " and batch " + std::to_string(h_prev.rows()));
  }
}

GruCell::GruCell(const std::string& name, std::size_t input_size, std::size_t hidden_size, Rng& rng)
    : RecurrentCell(input_size, hidden_size),
      input_proj(name + ".input", input_size, 3 * hidden_size, rng),
      hidden_proj(name + ".hidden", hidden_size, 3 * hidden_size, rng) {}

Tensor GruCell::forward(const Tensor& h_prev, const Tensor& x, RecurrentCache* cache) const {
  check_inputs(h_prev, x);
  const std::size_t batch = x.rows();
  const std::size_t H = hidden_size();
  const Tensor gx = input_proj.forward(x);
  const Tensor gh = hidden_proj.forward(h_prev);

  Tensor r = Tensor::matrix(batch, H), z = Tensor::matrix(batch, H), n = Tensor::matrix(batch, H);
  Tensor ghn = Tensor::matrix(batch, H), h = Tensor::matrix(batch, H);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* gxb = gx.data() + b * 3 * H;
    const double* ghb = gh.data() + b * 3 * H;
    for (std::size_t j = 0; j < H; ++j) {
      const double rj = sigmoid(gxb[j] + ghb[j]);
      const double zj = sigmoid(gxb[H + j] + ghb[H + j]);
      const double nj = std::tanh(gxb[2 * H + j] + rj * ghb[2 * H + j]);
      r.at(b, j) = rj;
      z.at(b, j) = zj;
      n.at(b, j) = nj;
      ghn.at(b, j) = ghb[2 * H + j];
      h.at(b, j) = (1.0 - zj) * nj + zj * h_prev.at(b, j);
    }
  }
  if (cache != nullptr) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->h = h;
    cache->reset = std::move(r);
    cache->update = std::move(z);
    cache->candidate = std::move(n);
    cache->hidden_candidate = std::move(ghn);
  }
  return h;
}

std::pair<Tensor, Tensor> GruCell::backward(const RecurrentCache& c, const Tensor& dh) {
  require_shape(dh, c.h.shape(), "gru backward upstream");
  const std::size_t batch = dh.rows();
  const std::size_t H = hidden_size();
  Tensor dgx = Tensor::matrix(batch, 3 * H);
  Tensor dgh = Tensor::matrix(batch, 3 * H);
  Tensor dh_prev = Tensor::matrix(batch, H);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < H; ++j) {
      const double g = dh.at(b, j);
      const double r = c.reset.at(b, j), z = c.update.at(b, j), n = c.candidate.at(b, j);
      const double dz = g * (c.h_prev.at(b, j) - n);
      const double dn_pre = g * (1.0 - z) * (1.0 - n * n);
      const double dr_pre = dn_pre * c.hidden_candidate.at(b, j) * r * (1.0 - r);
      const double dz_pre = dz * z * (1.0 - z);
      dh_prev.at(b, j) = g * z;
      dgx.at(b, j) = dr_pre;
      dgx.at(b, H + j) = dz_pre;
      dgx.at(b, 2 * H + j) = dn_pre;
      dgh.at(b, j) = dr_pre;
      dgh.at(b, H + j) = dz_pre;
      dgh.at(b, 2 * H + j) = dn_pre * r;
    }
  }
  Tensor dx = input_proj.backward(c.x, dgx);
  const Tensor dh_hidden = hidden_proj.backward(c.h_prev, dgh);
  for (std::size_t i = 0; i < dh_prev.size(); ++i) dh_prev[i] += dh_hidden[i];
  return {std::move(dh_prev), std::move(dx)};
}

void GruCell::collect(ParamList& out) {
  input_proj.collect(out);
  hidden_proj.collect(out);
}

RnnCell::RnnCell(const std::string& name, std::size_t input_size, std::size_t hidden_size, Rng& rng)
    : RecurrentCell(input_size, hidden_size),
      input_proj(name + ".input", input_size, hidden_size, rng),
      hidden_proj(name + ".hidden", hidden_size, hidden_size, rng, Bias::Without) {}

Tensor RnnCell::forward(const Tensor& h_prev, const Tensor& x, RecurrentCache* cache) const {
  check_inputs(h_prev, x);
  Tensor pre = input_proj.forward(x);
  const Tensor hh = hidden_proj.forward(h_prev);
  for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += hh[i];
  Tensor h = activate(pre, Activation::Tanh);
  if (cache != nullptr) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->h = h;
  }
  return h;
}

std::pair<Tensor, Tensor> RnnCell::backward(const RecurrentCache& c, const Tensor& dh) {
  require_shape(dh, c.h.shape(), "rnn backward upstream");
  const Tensor dpre = activate_backward(c.h, dh, Activation::Tanh);
  Tensor dx = input_proj.backward(c.x, dpre);
  Tensor dh_prev = hidden_proj.backward(c.h_prev, dpre);
  return {std::move(dh_prev), std::move(dx)};
}

void RnnCell::collect(ParamList& out) {
  input_proj.collect(out);
  hidden_proj.collect(out);
}

std::unique_ptr<RecurrentCell> make_cell(CoreKind kind, const std::string& name, std::size_t input_size,
                                         std::size_t hidden_size, Rng& rng) {
  if (kind == CoreKind::Gru) return std::make_unique<GruCell>(name, input_size, hidden_size, rng);
  return std::make_unique<RnnCell>(name, input_size, hidden_size, rng);
}

}  // namespace atnm
