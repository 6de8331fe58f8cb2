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
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "swinscan/data.hpp"
#include "swinscan/metrics.hpp"
#include "swinscan/swin.hpp"

namespace swinscan::train {

struct TrainConfig {
  std::size_t epochs = 3;
  std::size_t batch_size = 32;
  double learning_rate = 3e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  bool augment = false;
  data::PreprocessConfig preprocess;

  void validate() const;  // ConfigError
};

/// Decoupled weight decay with bias-corrected adaptive moments, applied to
/// every parameter of the model. Moment buffers are keyed by parameter path.
class AdamW {
 public:
  AdamW(const TrainConfig& config);
  /// Uses the gradients currently held by the weights. Parameters without a
  /// gradient buffer are skipped.
  void step(swin::ModelWeights& weights);
  std::size_t steps_taken() const { return t_; }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  std::size_t t_ = 0;
  std::map<std::string, Moments> state_;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  std::size_t steps = 0;
  double mean_loss = 0;
  // On the evaluation split (the training set when none is given).
  metrics::Rate accuracy, precision, recall, f1;
  // Plain accuracy on the un-augmented training set.
  double train_accuracy = 0;
};

struct EvalResult {
  metrics::ConfusionMatrix confusion{2};
  metrics::MetricsReport report;
  std::vector<std::size_t> predictions;
};

/// Argmax predictions for every sample, in order. InputError when empty.
EvalResult evaluate(const swin::ModelWeights& weights, const std::vector<data::Sample>& samples,
                    const data::PreprocessConfig& preprocess = {}, std::size_t batch_size = 32);

struct TrainResult {
  swin::ModelWeights weights;
  std::vector<EpochMetrics> history;
};

/// Optional per-step observer: (global step, loss).
using StepHook = std::function<void(std::size_t, double)>;

/// Runs config.epochs epochs over `train_set`. Each step is forward,
/// cross-entropy, backward and one AdamW update. A non-finite loss aborts
/// with DivergedError naming the 1-based global step. Deterministic given
/// the seed.
TrainResult train(const swin::ModelWeights& initial, const std::vector<data::Sample>& train_set,
                  const TrainConfig& config, const std::vector<data::Sample>* eval_set = nullptr,
                  const StepHook& hook = {});

/// Loss of one fixed batch (no update).
double batch_loss(const swin::ModelWeights& weights, const data::Batch& batch);

/// One optimizer step on a fixed batch; returns the loss before the update.
double train_step(swin::ModelWeights& weights, AdamW& optimizer, const data::Batch& batch, std::size_t step);

// ---- logging ----

inline constexpr const char* kEpochCsvHeader = "epoch,steps,mean_loss,accuracy,precision,recall,f1";

/// Fixed-point with 9 decimals; undefined rates are written as "-".
std::string epoch_metrics_csv(const std::vector<EpochMetrics>& history);
void log_epoch_metrics(const std::vector<EpochMetrics>& history, const std::filesystem::path& path);
std::vector<EpochMetrics> parse_epoch_metrics(std::string_view csv);

// ---- synthetic data ----

/// Detection set: half bright centred disks ("Yes"), half blank noisy
/// backgrounds ("No"), 64 x 64 RGB in [0, 1]. Disks are shaded like a
/// sphere: flat disks make every patch constant, and a constant patch
/// normalizes to +/- one fixed token, which leaves the classifier a single
/// drifting direction to work with.
std::vector<data::Sample> synthetic_detection(std::size_t n, std::uint64_t seed);

/// Classification set: three bright blob shapes at distinct positions,
/// one per class (disk upper-left, square centre, wide ellipse lower-right).
std::vector<data::Sample> synthetic_classification(std::size_t n, std::uint64_t seed);

/// Disk whose brightness falls from `level` at the centre to
/// `background` at the rim, following sqrt(1 - (d/r)^2).
data::Image shaded_disk_image(std::size_t size, double cy, double cx, double radius, double level = 0.9,
                              double background = 0.05);

/// A single bright disk of the given radius at (cy, cx) on a dark
/// background; also the ground truth used by size estimation tests.
data::Image disk_image(std::size_t size, double cy, double cx, double radius, double level = 0.9,
                       double background = 0.05);

}  // namespace swinscan::train
