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

#include <cmath>
#include <random>

#include "swinscan/error.hpp"
#include "swinscan/swin.hpp"

namespace swinscan::swin {

SwinConfig SwinConfig::detection() { return SwinConfig{}; }

SwinConfig SwinConfig::classification() {
  SwinConfig c;
  c.num_classes = 3;
  return c;
}

std::size_t SwinConfig::grid_side(std::size_t stage) const {
  return (image_size / patch_size) >> stage;
}

std::size_t SwinConfig::stage_dim(std::size_t stage) const { return embed_dim << stage; }

std::size_t SwinConfig::mlp_hidden(std::size_t stage) const {
  return static_cast<std::size_t>(std::lround(mlp_ratio * static_cast<double>(stage_dim(stage))));
}

void SwinConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid SwinConfig: " + msg); };
  if (image_size == 0 || patch_size == 0 || embed_dim == 0 || window_size == 0)
    fail("sizes must be positive");
  if (in_channels != 3) fail("in_channels must be 3");
  if (image_size % patch_size != 0) fail("image_size must be a multiple of patch_size");
  if (depths.empty() || depths.size() != num_heads.size())
    fail("depths and num_heads must be nonempty and of equal length");
  if (shift_size >= window_size) fail("shift_size must be below window_size");
  if (num_classes != 2 && num_classes != 3) fail("num_classes must be 2 or 3");
  if (!(mlp_ratio > 0.0) || !std::isfinite(mlp_ratio)) fail("mlp_ratio must be positive");
  for (std::size_t s = 0; s < depths.size(); ++s) {
    const std::size_t side = grid_side(s);
    if (side == 0 || (s > 0 && (grid_side(s - 1) % 2 != 0)))
      fail("stage " + std::to_string(s) + " grid cannot be merged from the previous stage");
    if (side % window_size != 0)
      fail("stage " + std::to_string(s) + " grid side " + std::to_string(side) +
           " is not a multiple of window_size " + std::to_string(window_size));
    if (depths[s] == 0) fail("every stage needs at least one block");
    if (num_heads[s] == 0 || stage_dim(s) % num_heads[s] != 0)
      fail("stage " + std::to_string(s) + " width " + std::to_string(stage_dim(s)) +
           " is not divisible by " + std::to_string(num_heads[s]) + " heads");
    if (mlp_hidden(s) == 0) fail("mlp hidden width is zero");
  }
}

std::vector<ParamSpec> parameter_specs(const SwinConfig& c) {
  c.validate();
  std::vector<ParamSpec> specs;
  const std::size_t patch_dim = c.in_channels * c.patch_size * c.patch_size;
  specs.push_back({"patch_embed.proj.weight", {patch_dim, c.embed_dim}, InitKind::kTruncNormal});
  specs.push_back({"patch_embed.proj.bias", {c.embed_dim}, InitKind::kZeros});
  const std::size_t table = (2 * c.window_size - 1) * (2 * c.window_size - 1);
  for (std::size_t s = 0; s < c.num_stages(); ++s) {
    const std::size_t dim = c.stage_dim(s);
    const std::size_t hidden = c.mlp_hidden(s);
    for (std::size_t b = 0; b < c.depths[s]; ++b) {
      const std::string p = "stages." + std::to_string(s) + ".blocks." + std::to_string(b) + ".";
      specs.push_back({p + "norm1.weight", {dim}, InitKind::kOnes});
      specs.push_back({p + "norm1.bias", {dim}, InitKind::kZeros});
      specs.push_back({p + "attn.qkv.weight", {dim, 3 * dim}, InitKind::kTruncNormal});
      specs.push_back({p + "attn.qkv.bias", {3 * dim}, InitKind::kZeros});
      specs.push_back({p + "attn.relative_position_bias_table", {table, c.num_heads[s]},
                       InitKind::kTruncNormal});
      specs.push_back({p + "attn.proj.weight", {dim, dim}, InitKind::kTruncNormal});
      specs.push_back({p + "attn.proj.bias", {dim}, InitKind::kZeros});
      specs.push_back({p + "norm2.weight", {dim}, InitKind::kOnes});
      specs.push_back({p + "norm2.bias", {dim}, InitKind::kZeros});
      specs.push_back({p + "mlp.fc1.weight", {dim, hidden}, InitKind::kTruncNormal});
      specs.push_back({p + "mlp.fc1.bias", {hidden}, InitKind::kZeros});
      specs.push_back({p + "mlp.fc2.weight", {hidden, dim}, InitKind::kTruncNormal});
      specs.push_back({p + "mlp.fc2.bias", {dim}, InitKind::kZeros});
    }
    if (s + 1 < c.num_stages()) {
      const std::string p = "stages." + std::to_string(s) + ".downsample.";
      specs.push_back({p + "norm.weight", {4 * dim}, InitKind::kOnes});
      specs.push_back({p + "norm.bias", {4 * dim}, InitKind::kZeros});
      specs.push_back({p + "reduction.weight", {4 * dim, 2 * dim}, InitKind::kTruncNormal});
    }
  }
  const std::size_t last = c.stage_dim(c.num_stages() - 1);
  specs.push_back({"norm.weight", {last}, InitKind::kOnes});
  specs.push_back({"norm.bias", {last}, InitKind::kZeros});
  // Small head: with a full-scale head the first adaptive steps overshoot
  // and the early loss is not monotone; with a zero head the body gets no
  // gradient on the first step and convergence is slower.
  specs.push_back({"head.weight", {last, c.num_classes}, InitKind::kTruncNormal, 0.005});
  specs.push_back({"head.bias", {c.num_classes}, InitKind::kZeros});
  return specs;
}

ModelWeights::ModelWeights(SwinConfig config, std::map<std::string, Tensor> params)
    : config_(std::move(config)), params_(std::move(params)) {
  validate();
}

ModelWeights ModelWeights::initialize(const SwinConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::map<std::string, Tensor> params;
  for (auto& spec : parameter_specs(config)) {
    std::vector<double> values(shape_numel(spec.shape));
    for (double& v : values) {
      switch (spec.init) {
        case InitKind::kZeros:
          v = 0.0;
          break;
        case InitKind::kOnes:
          v = 1.0;
          break;
        case InitKind::kTruncNormal:
          do {
            v = normal(rng);
          } while (std::abs(v) > 2.0);
          v *= spec.std;
          break;
      }
    }
    params.emplace(spec.name, Tensor::from(spec.shape, std::move(values)));
  }
  return ModelWeights(config, std::move(params));
}

const Tensor& ModelWeights::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("missing parameter '" + name + "'");
  return it->second;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.numel();
  return n;
}

void ModelWeights::set_trainable(bool on) {
  for (auto& [_, t] : params_) t.set_requires_grad(on);
}

void ModelWeights::zero_grad() {
  for (auto& [_, t] : params_) t.zero_grad();
}

ModelWeights ModelWeights::clone() const {
  std::map<std::string, Tensor> copy;
  for (const auto& [name, t] : params_) copy.emplace(name, t.clone());
  return ModelWeights(config_, std::move(copy));
}

void ModelWeights::validate() const {
  const auto specs = parameter_specs(config_);
  if (specs.size() != params_.size()) {
    throw ConfigError("weights hold " + std::to_string(params_.size()) +
                      " parameters but the config declares " + std::to_string(specs.size()));
  }
  for (const auto& spec : specs) {
    const Tensor& t = at(spec.name);
    if (t.shape() != spec.shape) {
      throw ConfigError("parameter '" + spec.name + "' has shape " + shape_string(t.shape()) +
                        ", config expects " + shape_string(spec.shape));
    }
    for (double v : t.data()) {
      if (!std::isfinite(v)) throw ConfigError("parameter '" + spec.name + "' is not finite");
    }
  }
}

}  // namespace swinscan::swin
