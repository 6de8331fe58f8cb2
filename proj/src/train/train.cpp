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

#include "swinscan/train.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <random>
#include <sstream>

#include "swinscan/error.hpp"
#include "swinscan/ops.hpp"
#include "swinscan/simd/kernels.hpp"

namespace swinscan::train {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  preprocess.validate();
}

AdamW::AdamW(const TrainConfig& c)
    : lr_(c.learning_rate), beta1_(c.beta1), beta2_(c.beta2), eps_(c.eps), weight_decay_(c.weight_decay) {}

void AdamW::step(swin::ModelWeights& weights) {
  ++t_;
  const simd::AdamWStep st{lr_,
                           beta1_,
                           beta2_,
                           eps_,
                           weight_decay_,
                           1.0 - std::pow(beta1_, static_cast<double>(t_)),
                           1.0 - std::pow(beta2_, static_cast<double>(t_))};
  const auto& k = simd::active();
  for (const auto& [name, param] : weights.params()) {
    if (!param.has_grad()) continue;
    Tensor p = param;  // shared handle
    auto& mom = state_[name];
    if (mom.m.empty()) {
      mom.m.assign(p.numel(), 0.0);
      mom.v.assign(p.numel(), 0.0);
    }
    k.adamw(p.numel(), st, p.mutable_data().data(), p.grad().data(), mom.m.data(), mom.v.data());
  }
}

namespace {

std::size_t argmax(std::span<const double> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

data::Batch fixed_batch(const std::vector<data::Sample>& samples, std::size_t lo, std::size_t hi,
                        const data::PreprocessConfig& pre) {
  data::Batch b;
  std::vector<data::Image> imgs;
  for (std::size_t i = lo; i < hi; ++i) {
    imgs.push_back(data::normalize(samples[i].image, pre));
    b.labels.push_back(samples[i].label);
    b.indices.push_back(i);
  }
  b.images = data::stack_images(imgs);
  return b;
}

}  // namespace

EvalResult evaluate(const swin::ModelWeights& weights, const std::vector<data::Sample>& samples,
                    const data::PreprocessConfig& preprocess, std::size_t batch_size) {
  if (samples.empty()) throw InputError("cannot evaluate on an empty sample set");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  const std::size_t k = weights.config().num_classes;
  EvalResult out;
  out.confusion = metrics::ConfusionMatrix(k);
  std::vector<std::size_t> actual;
  for (std::size_t lo = 0; lo < samples.size(); lo += batch_size) {
    const std::size_t hi = std::min(samples.size(), lo + batch_size);
    auto batch = fixed_batch(samples, lo, hi, preprocess);
    Tensor logits = swin::forward(weights, batch.images);
    auto v = logits.data();
    for (std::size_t r = 0; r < hi - lo; ++r) {
      const std::size_t pred = argmax(v.subspan(r * k, k));
      if (batch.labels[r] >= k) throw LabelError("label out of range for the model", lo + r);
      out.confusion.add(batch.labels[r], pred);
      out.predictions.push_back(pred);
    }
  }
  out.report = metrics::report_for(out.confusion);
  return out;
}

double batch_loss(const swin::ModelWeights& weights, const data::Batch& batch) {
  return ops::cross_entropy(swin::forward(weights, batch.images), batch.labels).item();
}

double train_step(swin::ModelWeights& weights, AdamW& optimizer, const data::Batch& batch, std::size_t step) {
  weights.zero_grad();
  Tape tape;
  double loss_value = 0;
  try {
    Tape::Recording rec(tape);
    Tensor loss = ops::cross_entropy(swin::forward(weights, batch.images), batch.labels);
    loss_value = loss.item();
    if (!std::isfinite(loss_value)) throw NumericError("non-finite loss");
    backward(tape, loss);
  } catch (const NumericError& e) {
    throw DivergedError(fmt::format("training diverged at step {}: {}", step, e.what()), step);
  }
  optimizer.step(weights);
  return loss_value;
}

TrainResult train(const swin::ModelWeights& initial, const std::vector<data::Sample>& train_set,
                  const TrainConfig& config, const std::vector<data::Sample>* eval_set, const StepHook& hook) {
  config.validate();
  if (train_set.empty()) throw InputError("cannot train on an empty sample set");
  for (std::size_t i = 0; i < train_set.size(); ++i)
    if (train_set[i].label >= initial.config().num_classes) throw LabelError("label out of range for the model", i);

  TrainResult result{initial.clone(), {}};
  auto& w = result.weights;
  w.set_trainable(true);
  AdamW opt(config);
  std::mt19937_64 rng(config.seed);
  data::BatchOptions bopt;
  bopt.batch_size = config.batch_size;
  bopt.augment = config.augment;
  bopt.preprocess = config.preprocess;

  std::size_t global_step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto batches = data::make_batches(train_set, rng, bopt);
    double loss_sum = 0;
    for (const auto& b : batches) {
      ++global_step;
      const double loss = train_step(w, opt, b, global_step);
      loss_sum += loss;
      if (hook) hook(global_step, loss);
    }
    w.zero_grad();

    EpochMetrics m;
    m.epoch = epoch;
    m.steps = batches.size();
    m.mean_loss = loss_sum / static_cast<double>(batches.size());
    EvalResult on_train, held;
    try {
      on_train = evaluate(w, train_set, config.preprocess, config.batch_size);
      held = eval_set && !eval_set->empty() ? evaluate(w, *eval_set, config.preprocess, config.batch_size) : on_train;
    } catch (const NumericError& e) {
      throw DivergedError(fmt::format("training diverged at step {}: {}", global_step, e.what()), global_step);
    }
    m.train_accuracy = *metrics::accuracy(on_train.confusion);
    m.accuracy = held.report.overall_accuracy;
    m.precision = held.report.ppv;
    m.recall = held.report.sensitivity;
    m.f1 = held.report.f1;
    result.history.push_back(m);
  }
  w.set_trainable(false);
  return result;
}

namespace {
std::string cell(const metrics::Rate& r) { return r ? fmt::format("{:.9f}", *r) : "-"; }
}  // namespace

std::string epoch_metrics_csv(const std::vector<EpochMetrics>& history) {
  if (history.empty()) throw InputError("no epochs to log");
  std::string out = std::string(kEpochCsvHeader) + "\n";
  for (const auto& m : history)
    out += fmt::format("{},{},{:.9f},{},{},{},{}\n", m.epoch, m.steps, m.mean_loss, cell(m.accuracy),
                       cell(m.precision), cell(m.recall), cell(m.f1));
  return out;
}

void log_epoch_metrics(const std::vector<EpochMetrics>& history, const std::filesystem::path& path) {
  const auto text = epoch_metrics_csv(history);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<EpochMetrics> parse_epoch_metrics(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != kEpochCsvHeader) throw ParseError("unexpected metrics header", 0);
  std::size_t offset = line.size() + 1;
  std::vector<EpochMetrics> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() != 7) throw ParseError("expected 7 columns", offset);
    auto rate = [](const std::string& s) -> metrics::Rate { return s == "-" ? std::nullopt : metrics::Rate(std::stod(s)); };
    try {
      EpochMetrics m;
      m.epoch = std::stoul(f[0]);
      m.steps = std::stoul(f[1]);
      m.mean_loss = std::stod(f[2]);
      m.accuracy = rate(f[3]);
      m.precision = rate(f[4]);
      m.recall = rate(f[5]);
      m.f1 = rate(f[6]);
      out.push_back(m);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", offset);
    }
    offset += line.size() + 1;
  }
  return out;
}

}  // namespace swinscan::train
