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

#include <sstream>

#include "atnm/error.hpp"
#include "atnm/metrics/f1.hpp"

using namespace atnm;

namespace {

ClassCounts counts_of(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  ClassCounts c(1);
  c.tp[0] = tp;
  c.fp[0] = fp;
  c.fn[0] = fn;
  c.known[0] = tp + fp + fn + 1;
  return c;
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("F1 formula cases") {
    CHECK(f1_per_class(counts_of(0, 0, 0))[0] == 0.0);
    CHECK(f1_per_class(counts_of(5, 0, 0))[0] == 1.0);
    CHECK(f1_per_class(counts_of(3, 1, 2))[0] == doctest::Approx(6.0 / 9.0).epsilon(1e-15));
  }

  TEST_CASE("three-example hand case") {
    ClassCounts c(2);
    const std::vector<std::vector<double>> pred = {{0.9, 0.2}, {0.4, 0.7}, {0.6, 0.6}};
    const std::vector<std::vector<double>> label = {{1, 0}, {1, 1}, {0, 1}};
    const std::vector<std::vector<std::uint8_t>> known = {{1, 1}, {1, 1}, {1, 0}};
    for (std::size_t i = 0; i < 3; ++i) accumulate(c, pred[i], label[i], known[i]);
    // class 0: TP (ex0), FN (ex1), FP (ex2); class 1: TN, TP, unknown
    CHECK(c.tp == std::vector<std::uint64_t>{1, 1});
    CHECK(c.fp == std::vector<std::uint64_t>{1, 0});
    CHECK(c.fn == std::vector<std::uint64_t>{1, 0});
    CHECK(c.known == std::vector<std::uint64_t>{3, 2});
    CHECK(macro_f1(c) == doctest::Approx((0.5 + 1.0) / 2.0));
  }

  TEST_CASE("all-correct predictions have no errors; unknown labels never count") {
    ClassCounts c(3);
    const std::vector<double> label{1, 0, 1};
    accumulate(c, std::vector<double>{0.9, 0.1, 0.3}, label, std::vector<std::uint8_t>{1, 1, 0});
    CHECK(c.fp == std::vector<std::uint64_t>{0, 0, 0});
    CHECK(c.fn == std::vector<std::uint64_t>{0, 0, 0});
    CHECK(c.known[2] == 0);
    ClassCounts d(3);
    accumulate(d, std::vector<double>{0.9, 0.1, 0.9}, label, std::vector<std::uint8_t>{1, 1, 0});
    CHECK(d.tp == c.tp);
    CHECK(d.known == c.known);
  }

  TEST_CASE("macro F1 skips classes without known labels and ignores class order") {
    ClassCounts c(3);
    c.tp = {2, 0, 1};
    c.fp = {0, 0, 1};
    c.fn = {0, 0, 0};
    c.known = {4, 0, 5};
    CHECK(macro_f1(c) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
    ClassCounts p(3);
    p.tp = {1, 2, 0};
    p.fp = {1, 0, 0};
    p.fn = {0, 0, 0};
    p.known = {5, 4, 0};
    CHECK(macro_f1(p) == doctest::Approx(macro_f1(c)).epsilon(1e-15));
    CHECK(macro_f1(ClassCounts(2)) == 0.0);
  }

  TEST_CASE("merging partial counts is exact") {
    ClassCounts a(2), b(2), all(2);
    const std::vector<std::vector<double>> pred = {{0.9, 0.2}, {0.4, 0.7}, {0.6, 0.6}, {0.1, 0.8}};
    const std::vector<std::vector<double>> label = {{1, 0}, {1, 1}, {0, 1}, {0, 0}};
    const std::vector<std::uint8_t> known{1, 1};
    for (std::size_t i = 0; i < 4; ++i) {
      accumulate(i < 2 ? a : b, pred[i], label[i], known);
      accumulate(all, pred[i], label[i], known);
    }
    a.merge(b);
    CHECK(a.tp == all.tp);
    CHECK(a.fp == all.fp);
    CHECK(a.fn == all.fn);
    CHECK(a.known == all.known);
    CHECK_THROWS_AS(a.merge(ClassCounts(3)), DimensionError);
  }

  TEST_CASE("seed averaging is the cell-wise mean") {
    F1Table t1{{"a", "b"}, {0.2, 0.6}, 0.4};
    F1Table t2{{"a", "b"}, {0.4, 1.0}, 0.7};
    const std::vector<F1Table> both{t1, t2};
    const F1Table avg = seed_average(both);
    CHECK(avg.per_class[0] == doctest::Approx(0.3));
    CHECK(avg.per_class[1] == doctest::Approx(0.8));
    CHECK(avg.macro == doctest::Approx(0.55));
    const std::vector<F1Table> one{t1};
    CHECK(seed_average(one).per_class == t1.per_class);
    const std::vector<F1Table> same{t1, t1, t1};
    CHECK(seed_average(same).per_class[1] == doctest::Approx(0.6));
    const std::vector<F1Table> bad{t1, F1Table{{"a"}, {0.1}, 0.1}};
    CHECK_THROWS_AS(seed_average(bad), DimensionError);
  }

  TEST_CASE("CSV report has a header, one row per class and a macro row") {
    ClassCounts c(20);
    std::vector<std::string> names;
    for (int i = 0; i < 20; ++i) names.push_back("c" + std::to_string(i));
    const std::string csv = metrics_csv(c, names);
    CHECK(csv.rfind("class,f1,tp,fp,fn,known\n", 0) == 0);
    CHECK(line_count(csv) == 22);
    CHECK(csv.find("\nmacro,") != std::string::npos);
    const auto j = metrics_json(c, names);
    CHECK(j["classes"].size() == 20);
    CHECK(j.contains("macro_f1"));
  }
}
