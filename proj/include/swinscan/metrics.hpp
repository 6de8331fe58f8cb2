// Copyright 2026 The SwinScan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace swinscan::metrics {

/// A rate in [0, 1], or nullopt when its denominator is zero.
using Rate = std::optional<double>;

/// k x k counts; rows are the actual class, columns the prediction.
/// For k == 2 the positive class is id 1 ("Yes", tumor present).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t k);
  static ConfusionMatrix binary(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn);

  std::size_t classes() const { return k_; }
  void add(std::size_t actual, std::size_t predicted, std::uint64_t count = 1);
  std::uint64_t at(std::size_t actual, std::size_t predicted) const { return counts_[actual * k_ + predicted]; }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  void merge(const ConfusionMatrix& other);
  ConfusionMatrix scaled(std::uint64_t factor) const;

  // Binary accessors; ContractError unless k == 2.
  std::uint64_t tp() const;
  std::uint64_t tn() const;
  std::uint64_t fp() const;
  std::uint64_t fn() const;

  /// Class c against the rest, as a 2 x 2 matrix with c positive.
  ConfusionMatrix one_vs_rest(std::size_t c) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

/// InputError on length mismatch or ids >= k.
ConfusionMatrix confusion_from_predictions(std::span<const std::size_t> actual,
                                           std::span<const std::size_t> predicted, std::size_t k);

Rate sensitivity(const ConfusionMatrix& cm);  // TP / (TP + FN)
Rate specificity(const ConfusionMatrix& cm);  // TN / (TN + FP)
Rate fall_out(const ConfusionMatrix& cm);     // FP / (TN + FP)
Rate miss_rate(const ConfusionMatrix& cm);    // FN / (FN + TP)
struct PredictiveValues {
  Rate ppv;  // TP / (TP + FP)
  Rate npv;  // TN / (TN + FN)
};
PredictiveValues predictive_values(const ConfusionMatrix& cm);
/// TP / (TP + (FP + FN) / 2), i.e. 2PR / (P + R). The product-over-sum
/// form without the factor 2 is not a harmonic mean and is not used.
Rate f1(const ConfusionMatrix& cm);
Rate accuracy(const ConfusionMatrix& cm);    // trace / total, any k
Rate error_rate(const ConfusionMatrix& cm);  // (total - trace) / total

struct MetricsReport {
  Rate sensitivity, specificity, fall_out, miss_rate, ppv, npv, f1, accuracy, error_rate;
  /// trace / total. Equals `accuracy` for two classes; for more classes
  /// `accuracy` is the mean of one-vs-rest accuracies.
  Rate overall_accuracy;
  std::vector<MetricsReport> per_class;  // filled for k > 2
};

/// Field names in rendering order, matching MetricsReport members.
const std::vector<std::string>& measure_keys();
Rate measure(const MetricsReport& r, std::string_view key);

MetricsReport binary_report(const ConfusionMatrix& cm);

struct Complements {
  Rate fall_out, miss_rate, error_rate;
};
/// 1 - specificity, 1 - sensitivity, 1 - accuracy.
Complements complement_rates(const MetricsReport& report);

/// Unweighted mean over classes of each one-vs-rest measure. A class whose
/// measure is undefined is left out of that mean; all undefined gives
/// undefined. Requires k >= 3.
MetricsReport macro_multiclass(const ConfusionMatrix& cm);

/// binary_report for k == 2, macro_multiclass otherwise.
MetricsReport report_for(const ConfusionMatrix& cm);

/// "99.90 %": two decimals, or three when the percentage is exact at three
/// decimals but not at two ("99.786 %"). Undefined renders as "-".
std::string format_percent(const Rate& rate);

nlohmann::ordered_json to_json(const MetricsReport& report);
nlohmann::ordered_json to_json(const ConfusionMatrix& cm);

// ---- published reference figures ----

/// Published two-column results, as rates.
MetricsReport reference_detection_report();
MetricsReport reference_classification_report();

struct ComparisonRow {
  std::string algorithm;
  std::string sensitivity, specificity, accuracy;  // rendered cells, "-" when missing
  std::optional<double> accuracy_percent;
};

/// Nine published algorithm rows followed by "Our Approach" built from
/// `ours` (sensitivity, specificity, accuracy).
std::vector<ComparisonRow> render_comparison(const MetricsReport& ours);
std::string comparison_text(const std::vector<ComparisonRow>& rows);

/// Two-column measure table (detection, classification).
std::string measures_text(const MetricsReport& detection, const MetricsReport& classification);

}  // namespace swinscan::metrics
