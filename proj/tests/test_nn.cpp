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

#include <cmath>

#include "atnm/error.hpp"
#include "atnm/nn/activation.hpp"
#include "atnm/nn/gradcheck.hpp"
#include "atnm/nn/linear.hpp"
#include "atnm/nn/recurrent.hpp"
#include "test_util.hpp"

using namespace atnm;
using atnm::test::random_tensor;

TEST_SUITE("tensor") {
  TEST_CASE("shape and data must agree") {
    CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5)), DimensionError);
    CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
    const Tensor t({2, 3, 4}, 1.5);
    CHECK(t.size() == 24);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 12);
    CHECK(shape_product(t.shape()) == 24);
  }

  TEST_CASE("reshape keeps data and rejects size changes") {
    const Tensor t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Tensor r = t.reshaped({3, 2});
    CHECK(r.at(2, 1) == 6.0);
    CHECK_THROWS_AS(t.reshaped({4, 2}), DimensionError);
  }

  TEST_CASE("require_shape reports both shapes") {
    const Tensor t = Tensor::matrix(2, 3);
    try {
      require_shape(t, {3, 2}, "weight");
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("2x3") != std::string::npos);
      CHECK(msg.find("3x2") != std::string::npos);
    }
  }
}

TEST_SUITE("linear") {
  TEST_CASE("identity weights pass the input through") {
    Linear fc("fc", 2, 2);
    fc.weight.value = Tensor::from_rows({{1, 0}, {0, 1}});
    CHECK(fc.forward(Tensor::from_rows({{1, 2}})) == Tensor::from_rows({{1, 2}}));
  }

  TEST_CASE("zero input passes the bias") {
    Rng rng(3);
    Linear fc("fc", 2, 2, rng);
    fc.bias.value = Tensor::row({3, -1});
    CHECK(fc.forward(Tensor::matrix(1, 2)) == Tensor::from_rows({{3, -1}}));
  }

  TEST_CASE("inner dimension mismatch names both shapes") {
    Linear fc("fc", 5, 3);
    try {
      fc.forward(Tensor::matrix(4, 4));
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("4x4") != std::string::npos);
      CHECK(msg.find("5x3") != std::string::npos);
    }
  }

  TEST_CASE("init is uniform in the Glorot range with zero bias") {
    Rng rng(0);
    Linear fc("fc", 40, 24, rng);
    const double a = std::sqrt(6.0 / 64.0);
    double lo = 1.0;
    double hi = -1.0;
    for (double w : fc.weight.value.values()) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    CHECK(lo >= -a);
    CHECK(hi <= a);
    CHECK(hi - lo > 1.8 * a);
    for (double b : fc.bias.value.values()) CHECK(b == 0.0);
  }

  TEST_CASE("backward matches the closed forms") {
    Rng rng(1);
    Linear fc("fc", 3, 2, rng);
    const Tensor x = random_tensor({4, 3}, rng);
    const Tensor dy = random_tensor({4, 2}, rng);
    const Tensor dx = fc.backward(x, dy);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        double dw = 0.0;
        for (std::size_t b = 0; b < 4; ++b) dw += x.at(b, i) * dy.at(b, j);
        CHECK(fc.weight.grad.at(i, j) == doctest::Approx(dw).epsilon(1e-14));
      }
    }
    for (std::size_t b = 0; b < 4; ++b) {
      for (std::size_t i = 0; i < 3; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < 2; ++j) v += dy.at(b, j) * fc.weight.value.at(i, j);
        CHECK(dx.at(b, i) == doctest::Approx(v).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("finite differences on a 4x5 input and 5x3 weights, 5 seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      Linear fc("fc", 5, 3, rng);
      test::randomize(fc.bias, rng);
      Parameter x = test::input_param("x", random_tensor({4, 5}, rng));
      const Tensor w = random_tensor({4, 3}, rng);
      ParamList params{&x};
      fc.collect(params);
      const auto report = finite_diff_check(params, [&](bool grad) {
        const Tensor y = fc.forward(x.value);
        if (grad) {
          const Tensor dx = fc.backward(x.value, w);
          for (std::size_t i = 0; i < dx.size(); ++i) x.grad[i] += dx[i];
        }
        return test::weighted_sum(y, w);
      });
      INFO("seed " << seed << " worst " << report.worst_param);
      CHECK(report.max_rel_error < 1e-6);
    }
  }
}

TEST_SUITE("activation") {
  TEST_CASE("fixed points") {
    CHECK(sigmoid(0.0) == 0.5);
    const Tensor y = activate(Tensor::row({-3.0, 2.0}), Activation::Relu);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 2.0);
    CHECK(activate(Tensor::row({0.0}), Activation::Tanh)[0] == 0.0);
  }

  TEST_CASE("sigmoid stays in (0,1) and finite for large inputs") {
    for (double x : {-1e3, -40.0, -1.0, 1.0, 40.0, 1e3}) {
      const double s = sigmoid(x);
      CHECK(std::isfinite(s));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    CHECK(sigmoid(-30.0) > 0.0);
    CHECK(sigmoid(30.0) < 1.0);
  }

  TEST_CASE("parse rejects unknown names") {
    CHECK(parse_activation("tanh") == Activation::Tanh);
    CHECK_THROWS_AS(parse_activation("gelu"), ConfigError);
  }

  TEST_CASE("finite differences on a random 3x3 tensor, 5 seeds") {
    for (Activation kind : {Activation::Relu, Activation::Sigmoid, Activation::Tanh}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        Parameter x = test::input_param("x", random_tensor({3, 3}, rng, 2.0));
        const Tensor w = random_tensor({3, 3}, rng);
        const auto report = finite_diff_check({&x}, [&](bool grad) {
          const Tensor y = activate(x.value, kind);
          if (grad) x.grad = activate_backward(y, w, kind);
          return test::weighted_sum(y, w);
        });
        CHECK(report.max_rel_error < 1e-7);
      }
    }
  }
}

namespace {

// Loss = w_h . h'; checks parameters, h_prev and x together.
double cell_gradcheck(RecurrentCell& cell, std::size_t batch, Rng& rng) {
  ParamList params;
  cell.collect(params);
  test::randomize(params, rng);
  Parameter h = test::input_param("h_prev", random_tensor({batch, cell.hidden_size()}, rng, 0.9));
  Parameter x = test::input_param("x", random_tensor({batch, cell.input_size()}, rng));
  const Tensor w = random_tensor({batch, cell.hidden_size()}, rng);
  params.push_back(&h);
  params.push_back(&x);
  const auto report = finite_diff_check(params, [&](bool grad) {
    RecurrentCache cache;
    const Tensor out = cell.forward(h.value, x.value, grad ? &cache : nullptr);
    if (grad) {
      auto [dh, dx] = cell.backward(cache, w);
      h.grad = dh;
      x.grad = dx;
    }
    return test::weighted_sum(out, w);
  });
  INFO("worst " << report.worst_param << "[" << report.worst_index << "]");
  return report.max_rel_error;
}

}  // namespace

TEST_SUITE("recurrent") {
  TEST_CASE("GRU with a saturated update gate carries h_prev through") {
    Rng rng(4);
    GruCell cell("gru", 4, 8, rng);
    for (std::size_t j = 8; j < 16; ++j) cell.input_proj.bias.value[j] = 60.0;
    const Tensor h = random_tensor({2, 8}, rng, 0.9);
    const Tensor out = cell.forward(h, random_tensor({2, 4}, rng), nullptr);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i] - h[i]) < 1e-6);
  }

  TEST_CASE("GRU maps zero state and input to zero") {
    Rng rng(5);
    GruCell cell("gru", 4, 8, rng);
    const Tensor out = cell.forward(Tensor::matrix(2, 8), Tensor::matrix(2, 4), nullptr);
    for (double v : out.values()) CHECK(v == 0.0);
  }

  TEST_CASE("GRU output stays in [-1,1] when h_prev does") {
    Rng rng(6);
    GruCell cell("gru", 4, 8, rng);
    ParamList params;
    cell.collect(params);
    test::randomize(params, rng, 3.0);
    Tensor h = random_tensor({3, 8}, rng, 0.99);
    for (int step = 0; step < 50; ++step) {
      h = cell.forward(h, random_tensor({3, 4}, rng, 100.0), nullptr);
      for (double v : h.values()) REQUIRE(std::abs(v) <= 1.0);
    }
  }

  TEST_CASE("hidden size mismatch is a dimension error") {
    Rng rng(7);
    GruCell gru("gru", 4, 8, rng);
    RnnCell rnn("rnn", 4, 8, rng);
    CHECK_THROWS_AS(gru.forward(Tensor::matrix(2, 7), Tensor::matrix(2, 4), nullptr), DimensionError);
    CHECK_THROWS_AS(rnn.forward(Tensor::matrix(2, 7), Tensor::matrix(2, 4), nullptr), DimensionError);
    CHECK_THROWS_AS(rnn.forward(Tensor::matrix(2, 8), Tensor::matrix(3, 4), nullptr), DimensionError);
  }

  TEST_CASE("GRU finite differences on 2x8 hidden, 2x4 input, 5 seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      GruCell cell("gru", 4, 8, rng);
      CHECK(cell_gradcheck(cell, 2, rng) < 1e-5);
    }
  }

  TEST_CASE("RNN maps zero inputs with zero bias to zero") {
    Rng rng(8);
    RnnCell cell("rnn", 3, 5, rng);
    const Tensor out = cell.forward(Tensor::matrix(1, 5), Tensor::matrix(1, 3), nullptr);
    for (double v : out.values()) CHECK(v == 0.0);
  }

  TEST_CASE("RNN with W_h = 0, W_x = I is tanh-linear for small x") {
    Rng rng(9);
    RnnCell cell("rnn", 4, 4, rng);
    cell.hidden_proj.weight.value.fill(0.0);
    cell.input_proj.weight.value.fill(0.0);
    for (std::size_t i = 0; i < 4; ++i) cell.input_proj.weight.value.at(i, i) = 1.0;
    const Tensor x = Tensor::row({1e-2, -3e-3, 5e-4, 2e-2});
    const Tensor h = cell.forward(random_tensor({1, 4}, rng), x, nullptr);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(h[i] - x[i]) < std::pow(std::abs(x[i]), 3));
  }

  TEST_CASE("RNN hidden projection has no bias") {
    Rng rng(10);
    RnnCell cell("rnn", 3, 5, rng);
    ParamList params;
    cell.collect(params);
    CHECK(params.size() == 3);
    CHECK_FALSE(cell.hidden_proj.has_bias());
  }

  TEST_CASE("RNN finite differences, 5 seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      RnnCell cell("rnn", 4, 8, rng);
      CHECK(cell_gradcheck(cell, 2, rng) < 1e-5);
    }
  }

  TEST_CASE("core names") {
    CHECK(parse_core("gru") == CoreKind::Gru);
    CHECK(parse_core("rnn") == CoreKind::Rnn);
    CHECK_THROWS_AS(parse_core("lstm"), ConfigError);
  }
}

TEST_SUITE("gradcheck") {
  TEST_CASE("a wrong gradient is detected") {
    Parameter p("p", {3});
    p.value = Tensor({3}, std::vector<double>{0.5, -1.0, 2.0});
    const auto report = finite_diff_check({&p}, [&](bool grad) {
      double s = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        s += p.value[i] * p.value[i];
        if (grad) p.grad[i] += (i == 1 ? 3.0 : 2.0) * p.value[i];
      }
      return s;
    });
    CHECK(report.worst_param == "p");
    CHECK(report.worst_index == 1);
    CHECK(report.max_rel_error > 0.1);
  }

  TEST_CASE("large tensors are subsampled to the configured count") {
    Parameter p("p", {40, 10});
    const auto report = finite_diff_check({&p}, [&](bool grad) {
      double s = 0.0;
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        s += 0.5 * p.value[i] * p.value[i] + p.value[i];
        if (grad) p.grad[i] += p.value[i] + 1.0;
      }
      return s;
    });
    CHECK(report.coords_checked == 64);
    CHECK(report.max_rel_error < 1e-8);
  }
}
