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

#include "atnm/metrics/f1.hpp"

#include <cstdio>

#include "atnm/error.hpp"

namespace atnm {

ClassCounts& ClassCounts::merge(const ClassCounts& other) {
  if (other.classes() != classes()) throw DimensionError("cannot merge counts over different class sets");
  for (std::size_t c = 0; c < classes(); ++c) {
    tp[c] += other.tp[c];
    fp[c] += other.fp[c];
    fn[c] += other.fn[c];
    known[c] += other.known[c];
  }
  return *this;
}

void accumulate(ClassCounts& counts, std::span<const double> pred, std::span<const double> label,
                std::span<const std::uint8_t> known, double threshold) {
  if (pred.size() != counts.classes() || label.size() != counts.classes() || known.size() != counts.classes()) {
    throw DimensionError("metrics: prediction, label and mask must have " + std::to_string(counts.classes()) +
                         " entries");
  }
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (!known[c]) continue;
    ++counts.known[c];
    const bool predicted = pred[c] >= threshold;
    const bool actual = label[c] >= 0.5;
    if (predicted && actual) ++counts.tp[c];
    else if (predicted) ++counts.fp[c];
    else if (actual) ++counts.fn[c];
  }
}

std::vector<double> f1_per_class(const ClassCounts& counts) {
  std::vector<double> f1(counts.classes(), 0.0);
  for (std::size_t c = 0; c < counts.classes(); ++c) {
    const double denom = 2.0 * static_cast<double>(counts.tp[c]) + static_cast<double>(counts.fp[c]) +
                         static_cast<double>(counts.fn[c]);
    f1[c] = denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(counts.tp[c]) / denom;
  }
  return f1;
}

double macro_f1(const ClassCounts& counts) {
  const auto f1 = f1_per_class(counts);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < f1.size(); ++c) {
    if (counts.known[c] == 0) continue;
    sum += f1[c];
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

F1Table f1_table(const ClassCounts& counts, std::vector<std::string> class_names) {
  if (class_names.size() != counts.classes()) throw DimensionError("one class name per class required");
  return {std::move(class_names), f1_per_class(counts), macro_f1(counts)};
}

F1Table seed_average(std::span<const F1Table> tables) {
  if (tables.empty()) throw DimensionError("seed_average needs at least one table");
  F1Table out{tables.front().class_names, std::vector<double>(tables.front().per_class.size(), 0.0), 0.0};
  for (const auto& t : tables) {
    if (t.per_class.size() != out.per_class.size() || t.class_names != out.class_names) {
      throw DimensionError("seed_average: tables have different class sets");
    }
    for (std::size_t c = 0; c < t.per_class.size(); ++c) out.per_class[c] += t.per_class[c];
    out.macro += t.macro;
  }
  const double n = static_cast<double>(tables.size());
  for (double& v : out.per_class) v /= n;
  out.macro /= n;
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string metrics_csv(const ClassCounts& counts, const std::vector<std::string>& class_names) {
  const F1Table table = f1_table(counts, class_names);
  std::string out = "class,f1,tp,fp,fn,known\n";
  std::uint64_t tp = 0, fp = 0, fn = 0, known = 0;
  for (std::size_t c = 0; c < counts.classes(); ++c) {
    out += class_names[c] + "," + fmt(table.per_class[c]) + "," + std::to_string(counts.tp[c]) + "," +
           std::to_string(counts.fp[c]) + "," + std::to_string(counts.fn[c]) + "," + std::to_string(counts.known[c]) +
           "\n";
    tp += counts.tp[c];
    fp += counts.fp[c];
    fn += counts.fn[c];
    known += counts.known[c];
  }
  out += "macro," + fmt(table.macro) + "," + std::to_string(tp) + "," + std::to_string(fp) + "," +
         std::to_string(fn) + "," + std::to_string(known) + "\n";
  return out;
}

nlohmann::json metrics_json(const ClassCounts& counts, const std::vector<std::string>& class_names) {
  const F1Table table = f1_table(counts, class_names);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t c = 0; c < counts.classes(); ++c) {
    rows.push_back({{"class", class_names[c]},
                    {"f1", table.per_class[c]},
                    {"tp", counts.tp[c]},
                    {"fp", counts.fp[c]},
                    {"fn", counts.fn[c]},
                    {"known", counts.known[c]}});
  }
  return {{"classes", rows}, {"macro_f1", table.macro}};
}

std::string f1_table_csv(const F1Table& table) {
  std::string out = "class,f1\n";
  for (std::size_t c = 0; c < table.per_class.size(); ++c) out += table.class_names[c] + "," + fmt(table.per_class[c]) + "\n";
  out += "macro," + fmt(table.macro) + "\n";
  return out;
}

}  // namespace atnm
