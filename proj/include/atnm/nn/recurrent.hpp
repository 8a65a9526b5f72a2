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

#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "atnm/nn/linear.hpp"

namespace atnm {

enum class CoreKind { Gru, Rnn };

CoreKind parse_core(std::string_view name);
std::string_view core_name(CoreKind kind);

/// Activations one step keeps for its backward pass. The RNN only fills
/// x, h_prev and h.
struct RecurrentCache {
  Tensor x;
  Tensor h_prev;
  Tensor h;
  Tensor reset;
  Tensor update;
  Tensor candidate;
  Tensor hidden_candidate;  // h_prev W_hn + b_hn, before the reset gate
};

class RecurrentCell {
 public:
  virtual ~RecurrentCell() = default;

  /// h_prev [batch x H], x [batch x D] -> h [batch x H].
  virtual Tensor forward(const Tensor& h_prev, const Tensor& x, RecurrentCache* cache) const = 0;
  /// Accumulates parameter gradients; returns {dh_prev, dx}.
  virtual std::pair<Tensor, Tensor> backward(const RecurrentCache& cache, const Tensor& dh) = 0;
  virtual void collect(ParamList& out) = 0;
  virtual CoreKind kind() const = 0;

  std::size_t input_size() const { return input_size_; }
  std::size_t hidden_size() const { return hidden_size_; }

 protected:
  RecurrentCell(std::size_t input_size, std::size_t hidden_size)
      : input_size_(input_size), hidden_size_(hidden_size) {}
  void check_inputs(const Tensor& h_prev, const Tensor& x) const;

 private:
  std::size_t input_size_;
  std::size_t hidden_size_;
};

/// Gated recurrent unit, gates ordered [reset | update | candidate]:
///   r = s(x W_xr + b_xr + h W_hr + b_hr)
///   z = s(x W_xz + b_xz + h W_hz + b_hz)
///   n = tanh(x W_xn + b_xn + r * (h W_hn + b_hn))
///   h' = (1 - z) * n + z * h
class GruCell final : public RecurrentCell {
 public:
  GruCell(const std::string& name, std::size_t input_size, std::size_t hidden_size, Rng& rng);

  Tensor forward(const Tensor& h_prev, const Tensor& x, RecurrentCache* cache) const override;
  std::pair<Tensor, Tensor> backward(const RecurrentCache& cache, const Tensor& dh) override;
  void collect(ParamList& out) override;
  CoreKind kind() const override { return CoreKind::Gru; }

  Linear input_proj;   // D -> 3H
  Linear hidden_proj;  // H -> 3H
};

/// Elman cell: h' = tanh(h W_h + x W_x + b).
class RnnCell final : public RecurrentCell {
 public:
  RnnCell(const std::string& name, std::size_t input_size, std::size_t hidden_size, Rng& rng);

  Tensor forward(const Tensor& h_prev, const Tensor& x, RecurrentCache* cache) const override;
  std::pair<Tensor, Tensor> backward(const RecurrentCache& cache, const Tensor& dh) override;
  void collect(ParamList& out) override;
  CoreKind kind() const override { return CoreKind::Rnn; }

  Linear input_proj;   // D -> H, carries the bias
  Linear hidden_proj;  // H -> H, no bias
};

std::unique_ptr<RecurrentCell> make_cell(CoreKind kind, const std::string& name, std::size_t input_size,
                                         std::size_t hidden_size, Rng& rng);

}  // namespace atnm
