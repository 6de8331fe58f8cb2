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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swinscan/tensor.hpp"

/// Shifted-window transformer: patch embedding, windowed multi-head
/// attention with cyclic shift and region masks, relative position bias,
/// patch merging, and a pooled linear classification head.
///
/// Token grids are carried as [B x H x W x C] tensors.
namespace swinscan::swin {

struct SwinConfig {
  std::size_t image_size = 64;
  std::size_t in_channels = 3;
  std::size_t patch_size = 4;
  std::size_t embed_dim = 32;
  std::vector<std::size_t> depths{2, 2};
  std::vector<std::size_t> num_heads{2, 4};
  std::size_t window_size = 4;
  std::size_t shift_size = 2;
  double mlp_ratio = 4.0;
  std::size_t num_classes = 2;

  /// Desk-scale defaults for the Yes/No detection head.
  static SwinConfig detection();
  /// Same architecture with the three tumor-type classes.
  static SwinConfig classification();

  std::size_t num_stages() const { return depths.size(); }
  /// Token-grid side length at `stage`.
  std::size_t grid_side(std::size_t stage) const;
  /// Channel width at `stage`.
  std::size_t stage_dim(std::size_t stage) const;
  std::size_t mlp_hidden(std::size_t stage) const;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  bool operator==(const SwinConfig&) const = default;
};

enum class InitKind { kTruncNormal, kZeros, kOnes };

struct ParamSpec {
  std::string name;
  Shape shape;
  InitKind init;
  double std = 0.02;  // for kTruncNormal; cut at two deviations
};

/// Every parameter the architecture declares, in a fixed order.
std::vector<ParamSpec> parameter_specs(const SwinConfig& config);

/// Named parameter store for one task head. Immutable once training ends;
/// concurrent forward passes may share it.
class ModelWeights {
 public:
  ModelWeights() = default;
  ModelWeights(SwinConfig config, std::map<std::string, Tensor> params);

  /// Truncated normal (std 0.02, cut at two deviations) for projection
  /// weights and bias tables, std 0.005 for the classifier head; zero
  /// biases; unit LayerNorm gains.
  static ModelWeights initialize(const SwinConfig& config, std::uint64_t seed);

  const SwinConfig& config() const { return config_; }
  const Tensor& at(const std::string& name) const;
  const std::map<std::string, Tensor>& params() const { return params_; }
  std::size_t parameter_count() const;

  /// Enables gradients on every parameter.
  void set_trainable(bool on);
  void zero_grad();

  /// Independent copy with the same values.
  ModelWeights clone() const;

  /// Checks that every declared path is present once with its declared
  /// shape, nothing else is present, and all values are finite.
  void validate() const;

 private:
  SwinConfig config_;
  std::map<std::string, Tensor> params_;
};

/// Per-window additive mask, [windows x tokens x tokens], entries 0 or -1e9.
struct AttentionMask {
  static constexpr double kBlocked = -1e9;

  std::size_t windows = 0;
  std::size_t tokens = 0;
  std::vector<double> values;

  double at(std::size_t window, std::size_t i, std::size_t j) const {
    return values[(window * tokens + i) * tokens + j];
  }
  bool all_zero() const;
};

/// Flattened patches projected to tokens: images [B x C x S x S] ->
/// [B x S/p x S/p x embed_dim]. Patches are flattened channel-major, then
/// row, then column.
Tensor patch_embed(const Tensor& images, const ModelWeights& weights);

/// [B x H x W x C] -> [B * (H/w) * (W/w) x w*w x C]; windows in row-major
/// order per image, tokens row-major within a window.
Tensor window_partition(const Tensor& tokens, std::size_t window_size);

/// Inverse of window_partition.
Tensor window_reverse(const Tensor& windows, std::size_t height, std::size_t width,
                      std::size_t window_size);

/// Toroidal roll by (-dy, -dx): out[i][j] = in[(i + dy) mod H][(j + dx) mod W].
Tensor cyclic_shift(const Tensor& tokens, long dy, long dx);

/// Region mask for attention on a grid that was cyclically shifted by
/// `shift_size`. Rows and columns are cut at (-window, -shift) into three
/// bands each; token pairs from different bands are blocked.
AttentionMask build_shift_mask(std::size_t height, std::size_t width, std::size_t window_size,
                               std::size_t shift_size);

/// Index into the (2w-1)^2 bias table for every ordered token pair of a
/// window: (drow + w - 1) * (2w - 1) + (dcol + w - 1).
std::vector<std::size_t> relative_bias_index(std::size_t window_size);

/// Parameters of one attention layer.
struct AttentionParams {
  Tensor qkv_weight;   // [C x 3C]
  Tensor qkv_bias;     // [3C]
  Tensor bias_table;   // [(2w-1)^2 x heads]
  Tensor proj_weight;  // [C x C]
  Tensor proj_bias;    // [C]
  std::size_t num_heads = 1;
};

AttentionParams attention_params(const ModelWeights& weights, std::size_t stage,
                                 std::size_t block);

/// Optional diagnostics from window_attention.
struct AttentionTrace {
  Tensor probabilities;        // [windows x heads x L x L]
  std::uint64_t score_macs = 0;  // multiply-accumulates in QK^T and AV
};

/// Multi-head scaled dot-product attention inside each window, with the
/// relative position bias and the (optional) mask added to the logits.
/// windows: [N x L x C] where N is a multiple of mask->windows.
Tensor window_attention(const Tensor& windows, const AttentionParams& params,
                        std::size_t window_size, const AttentionMask* mask,
                        AttentionTrace* trace = nullptr);

/// [B x H x W x C] -> [B x H/2 x W/2 x 4C]. Each 2x2 neighborhood is
/// concatenated as top-left, bottom-left, top-right, bottom-right.
Tensor merge_neighborhoods(const Tensor& tokens);

/// merge_neighborhoods, then LayerNorm and a bias-free 4C -> 2C projection.
Tensor patch_merging(const Tensor& tokens, const Tensor& norm_weight, const Tensor& norm_bias,
                     const Tensor& reduction);

/// One transformer block; `shift` is 0 or the configured shift size.
Tensor swin_block(const Tensor& tokens, const ModelWeights& weights, std::size_t stage,
                  std::size_t block, std::size_t shift);

/// Full network: images [B x C x S x S] -> logits [B x num_classes].
Tensor forward(const ModelWeights& weights, const Tensor& images);

struct Prediction {
  std::vector<double> logits;
  std::vector<double> probabilities;
  std::size_t label = 0;
};

/// Single image [C x S x S] (already normalized).
Prediction forward_classify(const ModelWeights& weights, const Tensor& image);

}  // namespace swinscan::swin
