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

#include "swinscan/metrics.hpp"

#include <cmath>
#include <fmt/format.h>

#include "swinscan/error.hpp"

namespace swinscan::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {
  if (k < 2) throw InputError("confusion matrix needs at least two classes");
}

ConfusionMatrix ConfusionMatrix::binary(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
  ConfusionMatrix m(2);
  m.add(1, 1, tp);
  m.add(0, 0, tn);
  m.add(0, 1, fp);
  m.add(1, 0, fn);
  return m;
}

void ConfusionMatrix::add(std::size_t actual, std::size_t predicted, std::uint64_t count) {
  if (actual >= k_ || predicted >= k_)
    throw InputError(fmt::format("class id out of range: actual {}, predicted {}, k {}", actual, predicted, k_));
  counts_[actual * k_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, i);
  return s;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.k_ != k_) throw InputError("cannot merge confusion matrices of different sizes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

ConfusionMatrix ConfusionMatrix::scaled(std::uint64_t factor) const {
  ConfusionMatrix m = *this;
  for (auto& c : m.counts_) c *= factor;
  return m;
}

namespace {
void require_binary(const ConfusionMatrix& m) {
  if (m.classes() != 2) throw ContractError("binary accessor on a " + std::to_string(m.classes()) + "-class matrix");
}

Rate ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

std::uint64_t ConfusionMatrix::tp() const { return require_binary(*this), at(1, 1); }
std::uint64_t ConfusionMatrix::tn() const { return require_binary(*this), at(0, 0); }
std::uint64_t ConfusionMatrix::fp() const { return require_binary(*this), at(0, 1); }
std::uint64_t ConfusionMatrix::fn() const { return require_binary(*this), at(1, 0); }

ConfusionMatrix ConfusionMatrix::one_vs_rest(std::size_t c) const {
  if (c >= k_) throw InputError("class id out of range");
  std::uint64_t tp = at(c, c), fn = 0, fp = 0, tn = 0;
  for (std::size_t a = 0; a < k_; ++a)
    for (std::size_t p = 0; p < k_; ++p) {
      if (a == c && p != c) fn += at(a, p);
      if (a != c && p == c) fp += at(a, p);
      if (a != c && p != c) tn += at(a, p);
    }
  return binary(tp, tn, fp, fn);
}

ConfusionMatrix confusion_from_predictions(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                                           std::size_t k) {
  if (actual.size() != predicted.size())
    throw InputError(fmt::format("{} labels but {} predictions", actual.size(), predicted.size()));
  ConfusionMatrix m(k);
  for (std::size_t i = 0; i < actual.size(); ++i) m.add(actual[i], predicted[i]);
  return m;
}

Rate sensitivity(const ConfusionMatrix& m) { return ratio(m.tp(), m.tp() + m.fn()); }
Rate specificity(const ConfusionMatrix& m) { return ratio(m.tn(), m.tn() + m.fp()); }
Rate fall_out(const ConfusionMatrix& m) { return ratio(m.fp(), m.tn() + m.fp()); }
Rate miss_rate(const ConfusionMatrix& m) { return ratio(m.fn(), m.fn() + m.tp()); }

PredictiveValues predictive_values(const ConfusionMatrix& m) {
  return {ratio(m.tp(), m.tp() + m.fp()), ratio(m.tn(), m.tn() + m.fn())};
}

Rate f1(const ConfusionMatrix& m) {
  // TP / (TP + (FP+FN)/2) == 2TP / (2TP + FP + FN), kept in integers.
  return ratio(2 * m.tp(), 2 * m.tp() + m.fp() + m.fn());
}

Rate accuracy(const ConfusionMatrix& m) { return ratio(m.trace(), m.total()); }
Rate error_rate(const ConfusionMatrix& m) { return ratio(m.total() - m.trace(), m.total()); }

const std::vector<std::string>& measure_keys() {
  static const std::vector<std::string> keys{"sensitivity", "specificity", "fall_out", "miss_rate", "ppv",
                                             "npv",         "f1",          "accuracy", "error_rate"};
  return keys;
}

namespace {
Rate MetricsReport::*member(std::string_view key) {
  if (key == "sensitivity") return &MetricsReport::sensitivity;
  if (key == "specificity") return &MetricsReport::specificity;
  if (key == "fall_out") return &MetricsReport::fall_out;
  if (key == "miss_rate") return &MetricsReport::miss_rate;
  if (key == "ppv") return &MetricsReport::ppv;
  if (key == "npv") return &MetricsReport::npv;
  if (key == "f1") return &MetricsReport::f1;
  if (key == "accuracy") return &MetricsReport::accuracy;
  if (key == "error_rate") return &MetricsReport::error_rate;
  if (key == "overall_accuracy") return &MetricsReport::overall_accuracy;
  throw InputError("unknown measure '" + std::string(key) + "'");
}
}  // namespace

Rate measure(const MetricsReport& r, std::string_view key) { return r.*member(key); }

MetricsReport binary_report(const ConfusionMatrix& m) {
  MetricsReport r;
  r.sensitivity = sensitivity(m);
  r.specificity = specificity(m);
  r.fall_out = fall_out(m);
  r.miss_rate = miss_rate(m);
  auto pv = predictive_values(m);
  r.ppv = pv.ppv;
  r.npv = pv.npv;
  r.f1 = f1(m);
  r.accuracy = accuracy(m);
  r.error_rate = error_rate(m);
  r.overall_accuracy = r.accuracy;
  return r;
}

Complements complement_rates(const MetricsReport& r) {
  auto one_minus = [](const Rate& x) -> Rate { return x ? Rate(1.0 - *x) : std::nullopt; };
  return {one_minus(r.specificity), one_minus(r.sensitivity), one_minus(r.accuracy)};
}

MetricsReport macro_multiclass(const ConfusionMatrix& m) {
  if (m.classes() < 3) throw InputError("macro averaging needs at least three classes");
  MetricsReport out;
  for (std::size_t c = 0; c < m.classes(); ++c) out.per_class.push_back(binary_report(m.one_vs_rest(c)));
  for (const auto& key : measure_keys()) {
    auto mem = member(key);
    // Extended-precision accumulation: for a handful of classes the sum is
    // exact, so equal per-class rates average back to exactly that rate.
    long double sum = 0;
    std::size_t n = 0;
    for (const auto& pc : out.per_class)
      if (pc.*mem) {
        sum += *(pc.*mem);
        ++n;
      }
    out.*mem = n ? Rate(static_cast<double>(sum / static_cast<long double>(n))) : std::nullopt;
  }
  out.overall_accuracy = accuracy(m);
  return out;
}

MetricsReport report_for(const ConfusionMatrix& m) {
  return m.classes() == 2 ? binary_report(m) : macro_multiclass(m);
}

std::string format_percent(const Rate& rate) {
  if (!rate) return "-";
  const double p = *rate * 100.0;
  const double thousandths = std::round(p * 1000.0);
  const bool exact3 = std::abs(p * 1000.0 - thousandths) <= 1e-6;
  const bool needs3 = exact3 && std::fmod(std::abs(thousandths), 10.0) != 0.0;
  return needs3 ? fmt::format("{:.3f} %", p) : fmt::format("{:.2f} %", p);
}

namespace {
nlohmann::ordered_json rate_json(const Rate& r) { return r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(); }
}  // namespace

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  for (const auto& key : measure_keys()) j[key] = rate_json(r.*member(key));
  j["overall_accuracy"] = rate_json(r.overall_accuracy);
  if (!r.per_class.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& pc : r.per_class) {
      nlohmann::ordered_json e;
      for (const auto& key : measure_keys()) e[key] = rate_json(pc.*member(key));
      arr.push_back(std::move(e));
    }
    j["per_class"] = std::move(arr);
  }
  return j;
}

nlohmann::ordered_json to_json(const ConfusionMatrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < m.classes(); ++a) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < m.classes(); ++p) row.push_back(m.at(a, p));
    rows.push_back(std::move(row));
  }
  return rows;
}

MetricsReport reference_detection_report() {
  MetricsReport r;
  r.sensitivity = 0.9990;
  r.specificity = 0.9962;
  r.fall_out = 0.0038;
  r.miss_rate = 0.0010;
  r.ppv = 0.9980;
  r.npv = 0.9981;
  r.f1 = 0.9985;
  r.accuracy = 0.9981;
  r.error_rate = 0.0019;
  r.overall_accuracy = r.accuracy;
  return r;
}

MetricsReport reference_classification_report() {
  MetricsReport r;
  r.sensitivity = 0.9949;
  r.specificity = 0.99786;
  r.fall_out = 0.00214;
  r.miss_rate = 0.0051;
  r.ppv = 0.9961;
  r.npv = 0.9972;
  r.f1 = 0.9955;
  r.accuracy = 0.9951;
  r.error_rate = 0.0049;
  return r;
}

std::vector<ComparisonRow> render_comparison(const MetricsReport& ours) {
  std::vector<ComparisonRow> rows{
      {"KNN", "67 %", "83 %", "75 %", 75.0},
      {"ELM", "90 %", "78 %", "84 %", 84.0},
      {"FCM", "96 %", "93.3 %", "86.6 %", 86.6},
      {"U-Net", "-", "-", "91 %", 91.0},
      {"CapsNet", "-", "-", "92.65 %", 92.65},
      {"SVM", "90 %", "96 %", "93 %", 93.0},
      {"CDLLC", "94.64 %", "-", "96.39 %", 96.39},
      {"CNN", "96.4 %", "98.3 %", "97.8 %", 97.8},
      {"ANFIS", "96.6 %", "95.3 %", "98.67 %", 98.67},
  };
  rows.push_back({"Our Approach", format_percent(ours.sensitivity), format_percent(ours.specificity),
                  format_percent(ours.accuracy),
                  ours.accuracy ? std::optional<double>(*ours.accuracy * 100.0) : std::nullopt});
  return rows;
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
  std::string out = fmt::format("{:<14}{:>13}{:>13}{:>10}\n", "Algorithm", "Sensitivity", "Specificity", "Accuracy");
  for (const auto& r : rows)
    out += fmt::format("{:<14}{:>13}{:>13}{:>10}\n", r.algorithm, r.sensitivity, r.specificity, r.accuracy);
  return out;
}

std::string measures_text(const MetricsReport& det, const MetricsReport& cls) {
  static const std::vector<std::pair<std::string, std::string>> labels{
      {"sensitivity", "Sensitivity / Recall / TPR"}, {"specificity", "Specificity / TNR"},
      {"fall_out", "Fall-Out / FPR"},                {"miss_rate", "Miss Rate / FNR"},
      {"ppv", "PPV / Precision"},                    {"npv", "NPV"},
      {"f1", "F1 - Score"},                          {"accuracy", "Accuracy"},
      {"error_rate", "Error Rate"}};
  std::string out = fmt::format("{:<4}{:<30}{:>12}{:>16}\n", "#", "Measure", "Detection", "Classification");
  int i = 1;
  for (const auto& [key, label] : labels)
    out += fmt::format("{:<4}{:<30}{:>12}{:>16}\n", i++, label, format_percent(measure(det, key)),
                       format_percent(measure(cls, key)));
  return out;
}

}  // namespace swinscan::metrics
