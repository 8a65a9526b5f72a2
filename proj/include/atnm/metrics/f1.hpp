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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace atnm {

struct ClassCounts {
  std::vector<std::uint64_t> tp, fp, fn, known;

  explicit ClassCounts(std::size_t classes = 0) : tp(classes), fp(classes), fn(classes), known(classes) {}
  std::size_t classes() const { return tp.size(); }
  /// Counts are additive, so partial accumulations merge exactly.
  ClassCounts& merge(const ClassCounts& other);
};

/// Binarises at `threshold` and counts only classes whose label is known.
void accumulate(ClassCounts& counts, std::span<const double> pred, std::span<const double> label,
                std::span<const std::uint8_t> known, double threshold = 0.5);

/// 2tp / (2tp + fp + fn), 0 when the denominator is 0.
std::vector<double> f1_per_class(const ClassCounts& counts);
/// Unweighted mean over classes with at least one known label (0 if none).
double macro_f1(const ClassCounts& counts);

struct F1Table {
  std::vector<std::string> class_names;
  std::vector<double> per_class;
  double macro = 0.0;
};

F1Table f1_table(const ClassCounts& counts, std::vector<std::string> class_names);
/// Cell-wise arithmetic mean across seeds; shapes must match.
F1Table seed_average(std::span<const F1Table> tables);

/// "class,f1,tp,fp,fn,known" rows per class plus a final "macro" row.
std::string metrics_csv(const ClassCounts& counts, const std::vector<std::string>& class_names);
nlohmann::json metrics_json(const ClassCounts& counts, const std::vector<std::string>& class_names);
/// "class,f1" rows plus "macro".
std::string f1_table_csv(const F1Table& table);

}  // namespace atnm
