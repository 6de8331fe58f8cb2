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

#include <algorithm>
#include <cmath>

#include "swinscan/error.hpp"
#include "swinscan/ops.hpp"
#include "swinscan/swin.hpp"

namespace swinscan::swin {
namespace {

void require_grid(const Tensor& t, const char* op) {
  if (t.rank() != 4) {
    throw DimensionError(std::string(op) + ": expected [B x H x W x C] tokens, got " +
                         shape_string(t.shape()));
  }
}

// Window and shift actually used on a grid: a grid no larger than the
// window is attended as a single unshifted window.
std::size_t effective_window(std::size_t side, std::size_t window) {
  return std::min(side, window);
}

std::size_t effective_shift(std::size_t side, std::size_t window, std::size_t shift) {
  return side <= window ? 0 : shift;
}

std::string block_prefix(std::size_t stage, std::size_t block) {
  return "stages." + std::to_string(stage) + ".blocks." + std::to_string(block) + ".";
}

}  // namespace

bool AttentionMask::all_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

Tensor patch_embed(const Tensor& images, const ModelWeights& weights) {
  const SwinConfig& c = weights.config();
  if (images.rank() != 4 || images.dim(1) != c.in_channels) {
    throw InputError("patch_embed: expected [B x " + std::to_string(c.in_channels) +
                     " x H x W] images, got " + shape_string(images.shape()));
  }
  if (images.dim(2) != c.image_size || images.dim(3) != c.image_size) {
    throw InputError("patch_embed: expected " + std::to_string(c.image_size) + "x" +
                     std::to_string(c.image_size) + " images, got " + shape_string(images.shape()));
  }
  const std::size_t b = images.dim(0), p = c.patch_size, g = c.image_size / p;
  Tensor x = ops::reshape(images, {b, c.in_channels, g, p, g, p});
  x = ops::permute(x, {0, 2, 4, 1, 3, 5});
  x = ops::reshape(x, {b, g, g, c.in_channels * p * p});
  return ops::linear(x, weights.at("patch_embed.proj.weight"), weights.at("patch_embed.proj.bias"));
}

Tensor window_partition(const Tensor& tokens, std::size_t w) {
  require_grid(tokens, "window_partition");
  const std::size_t b = tokens.dim(0), h = tokens.dim(1), wd = tokens.dim(2), c = tokens.dim(3);
  if (w == 0 || h % w != 0 || wd % w != 0) {
    throw ConfigError("window_partition: grid " + std::to_string(h) + "x" + std::to_string(wd) +
                      " is not divisible by window " + std::to_string(w));
  }
  Tensor x = ops::reshape(tokens, {b, h / w, w, wd / w, w, c});
  x = ops::permute(x, {0, 1, 3, 2, 4, 5});
  return ops::reshape(x, {b * (h / w) * (wd / w), w * w, c});
}

Tensor window_reverse(const Tensor& windows, std::size_t height, std::size_t width,
                      std::size_t w) {
  if (windows.rank() != 3 || w == 0 || height % w != 0 || width % w != 0 ||
      windows.dim(1) != w * w) {
    throw DimensionError("window_reverse: windows " + shape_string(windows.shape()) +
                         " are inconsistent with a " + std::to_string(height) + "x" +
                         std::to_string(width) + " grid and window " + std::to_string(w));
  }
  const std::size_t per_image = (height / w) * (width / w);
  if (windows.dim(0) % per_image != 0) {
    throw DimensionError("window_reverse: " + std::to_string(windows.dim(0)) +
                         " windows is not a multiple of " + std::to_string(per_image));
  }
  const std::size_t b = windows.dim(0) / per_image, c = windows.dim(2);
  Tensor x = ops::reshape(windows, {b, height / w, width / w, w, w, c});
  x = ops::permute(x, {0, 1, 3, 2, 4, 5});
  return ops::reshape(x, {b, height, width, c});
}

Tensor cyclic_shift(const Tensor& tokens, long dy, long dx) {
  require_grid(tokens, "cyclic_shift");
  Tensor x = dy == 0 ? tokens : ops::roll(tokens, 1, -dy);
  return dx == 0 ? x : ops::roll(x, 2, -dx);
}

AttentionMask build_shift_mask(std::size_t height, std::size_t width, std::size_t w,
                               std::size_t shift) {
  if (w == 0 || shift >= w) throw ConfigError("build_shift_mask: shift must be below window");
  if (height % w != 0 || width % w != 0) {
    throw ConfigError("build_shift_mask: grid is not divisible by window");
  }
  AttentionMask mask;
  mask.windows = (height / w) * (width / w);
  mask.tokens = w * w;
  mask.values.assign(mask.windows * mask.tokens * mask.tokens, 0.0);
  if (shift == 0) return mask;

  auto band = [w, shift](std::size_t i, std::size_t extent) -> std::size_t {
    if (i < extent - w) return 0;
    if (i < extent - shift) return 1;
    return 2;
  };
  const std::size_t cols = width / w;
  std::vector<std::size_t> region(mask.tokens);
  for (std::size_t win = 0; win < mask.windows; ++win) {
    const std::size_t r0 = (win / cols) * w, c0 = (win % cols) * w;
    for (std::size_t t = 0; t < mask.tokens; ++t) {
      region[t] = band(r0 + t / w, height) * 3 + band(c0 + t % w, width);
    }
    for (std::size_t i = 0; i < mask.tokens; ++i)
      for (std::size_t j = 0; j < mask.tokens; ++j)
        if (region[i] != region[j])
          mask.values[(win * mask.tokens + i) * mask.tokens + j] = AttentionMask::kBlocked;
  }
  return mask;
}

std::vector<std::size_t> relative_bias_index(std::size_t w) {
  const std::size_t l = w * w, span = 2 * w - 1;
  std::vector<std::size_t> index(l * l);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      const std::size_t dr = i / w + (w - 1) - j / w;
      const std::size_t dc = i % w + (w - 1) - j % w;
      index[i * l + j] = dr * span + dc;
    }
  }
  return index;
}

AttentionParams attention_params(const ModelWeights& weights, std::size_t stage,
                                 std::size_t block) {
  const std::string p = block_prefix(stage, block) + "attn.";
  return {weights.at(p + "qkv.weight"),
          weights.at(p + "qkv.bias"),
          weights.at(p + "relative_position_bias_table"),
          weights.at(p + "proj.weight"),
          weights.at(p + "proj.bias"),
          weights.config().num_heads.at(stage)};
}

Tensor window_attention(const Tensor& windows, const AttentionParams& params, std::size_t w,
                        const AttentionMask* mask, AttentionTrace* trace) {
  if (windows.rank() != 3 || windows.dim(1) != w * w) {
    throw DimensionError("window_attention: expected [N x " + std::to_string(w * w) +
                         " x C] windows, got " + shape_string(windows.shape()));
  }
  const std::size_t n = windows.dim(0), l = windows.dim(1), c = windows.dim(2);
  const std::size_t heads = params.num_heads;
  if (heads == 0 || c % heads != 0) {
    throw ConfigError("window_attention: width " + std::to_string(c) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
  const std::size_t span = 2 * w - 1;
  if (params.bias_table.rank() != 2 || params.bias_table.dim(0) != span * span ||
      params.bias_table.dim(1) != heads) {
    throw ConfigError("window_attention: bias table " + shape_string(params.bias_table.shape()) +
                      " does not match window " + std::to_string(w) + " and " +
                      std::to_string(heads) + " heads");
  }
  if (mask && (mask->tokens != l || mask->windows == 0 || n % mask->windows != 0)) {
    throw ConfigError("window_attention: mask does not match the window layout");
  }
  const std::size_t d = c / heads;

  Tensor qkv = ops::linear(windows, params.qkv_weight, params.qkv_bias);
  qkv = ops::reshape(qkv, {n, l, 3, heads, d});
  qkv = ops::permute(qkv, {2, 0, 3, 1, 4});  // [3 x N x heads x L x d]
  auto part = [&](std::size_t i) {
    return ops::reshape(ops::narrow(qkv, 0, i, 1), {n * heads, l, d});
  };
  Tensor q = ops::scale(part(0), 1.0 / std::sqrt(static_cast<double>(d)));
  Tensor k = part(1);
  Tensor v = part(2);

  Tensor scores = ops::reshape(ops::bmm(q, k, /*transpose_b=*/true), {n, heads, l, l});
  const auto index = relative_bias_index(w);
  Tensor bias = ops::gather_rows(params.bias_table, index);  // [L*L x heads]
  bias = ops::reshape(ops::permute(bias, {1, 0}), {heads, l, l});
  scores = ops::add(scores, bias);

  if (mask && !mask->all_zero()) {
    const std::size_t nw = mask->windows;
    std::vector<double> expanded(nw * heads * l * l);
    for (std::size_t win = 0; win < nw; ++win)
      for (std::size_t h = 0; h < heads; ++h)
        std::copy_n(mask->values.begin() + win * l * l, l * l,
                    expanded.begin() + (win * heads + h) * l * l);
    Tensor m = Tensor::from({nw, heads, l, l}, std::move(expanded));
    scores = ops::reshape(ops::add(ops::reshape(scores, {n / nw, nw, heads, l, l}), m),
                          {n, heads, l, l});
  }

  Tensor probs = ops::softmax_lastdim(scores);
  Tensor out = ops::bmm(ops::reshape(probs, {n * heads, l, l}), v);  // [N*heads x L x d]
  out = ops::permute(ops::reshape(out, {n, heads, l, d}), {0, 2, 1, 3});
  out = ops::reshape(out, {n, l, c});
  if (trace) {
    trace->probabilities = probs;
    trace->score_macs += 2ULL * n * heads * l * l * d;
  }
  return ops::linear(out, params.proj_weight, params.proj_bias);
}

Tensor merge_neighborhoods(const Tensor& tokens) {
  require_grid(tokens, "patch_merging");
  const std::size_t b = tokens.dim(0), h = tokens.dim(1), w = tokens.dim(2), c = tokens.dim(3);
  if (h % 2 != 0 || w % 2 != 0) {
    throw ConfigError("patch_merging: grid " + std::to_string(h) + "x" + std::to_string(w) +
                      " has an odd extent");
  }
  // [B, H/2, dy, W/2, dx, C] -> [B, H/2, W/2, dx, dy, C]: slot = 2*dx + dy.
  Tensor x = ops::reshape(tokens, {b, h / 2, 2, w / 2, 2, c});
  x = ops::permute(x, {0, 1, 3, 4, 2, 5});
  return ops::reshape(x, {b, h / 2, w / 2, 4 * c});
}

Tensor patch_merging(const Tensor& tokens, const Tensor& norm_weight, const Tensor& norm_bias,
                     const Tensor& reduction) {
  Tensor x = ops::layer_norm(merge_neighborhoods(tokens), norm_weight, norm_bias);
  return ops::linear(x, reduction, Tensor());
}

Tensor swin_block(const Tensor& tokens, const ModelWeights& weights, std::size_t stage,
                  std::size_t block, std::size_t shift) {
  require_grid(tokens, "swin_block");
  const SwinConfig& c = weights.config();
  const std::size_t side = tokens.dim(1);
  const std::size_t w = effective_window(side, c.window_size);
  shift = effective_shift(side, c.window_size, shift);
  const std::string p = block_prefix(stage, block);

  Tensor h = ops::layer_norm(tokens, weights.at(p + "norm1.weight"), weights.at(p + "norm1.bias"));
  const long s = static_cast<long>(shift);
  if (shift) h = cyclic_shift(h, s, s);
  AttentionMask mask;
  if (shift) mask = build_shift_mask(side, tokens.dim(2), w, shift);
  Tensor win = window_partition(h, w);
  win = window_attention(win, attention_params(weights, stage, block), w, shift ? &mask : nullptr);
  h = window_reverse(win, side, tokens.dim(2), w);
  if (shift) h = cyclic_shift(h, -s, -s);
  Tensor x = ops::add(tokens, h);

  Tensor m = ops::layer_norm(x, weights.at(p + "norm2.weight"), weights.at(p + "norm2.bias"));
  m = ops::gelu(ops::linear(m, weights.at(p + "mlp.fc1.weight"), weights.at(p + "mlp.fc1.bias")));
  m = ops::linear(m, weights.at(p + "mlp.fc2.weight"), weights.at(p + "mlp.fc2.bias"));
  return ops::add(x, m);
}

Tensor forward(const ModelWeights& weights, const Tensor& images) {
  const SwinConfig& c = weights.config();
  Tensor x = patch_embed(images, weights);
  for (std::size_t s = 0; s < c.num_stages(); ++s) {
    for (std::size_t b = 0; b < c.depths[s]; ++b) {
      x = swin_block(x, weights, s, b, b % 2 == 1 ? c.shift_size : 0);
    }
    if (s + 1 < c.num_stages()) {
      const std::string p = "stages." + std::to_string(s) + ".downsample.";
      x = patch_merging(x, weights.at(p + "norm.weight"), weights.at(p + "norm.bias"),
                        weights.at(p + "reduction.weight"));
    }
  }
  x = ops::layer_norm(x, weights.at("norm.weight"), weights.at("norm.bias"));
  const std::size_t b = x.dim(0);
  x = ops::mean_axis(ops::reshape(x, {b, x.dim(1) * x.dim(2), x.dim(3)}), 1);
  return ops::linear(x, weights.at("head.weight"), weights.at("head.bias"));
}

Prediction forward_classify(const ModelWeights& weights, const Tensor& image) {
  if (image.rank() != 3) {
    throw InputError("forward_classify: expected a [C x H x W] image, got " +
                     shape_string(image.shape()));
  }
  Shape batched{1, image.dim(0), image.dim(1), image.dim(2)};
  Tensor logits = forward(weights, Tensor::from(batched, {image.data().begin(), image.data().end()}));
  Tensor probs = ops::softmax_lastdim(logits);
  Prediction p;
  p.logits.assign(logits.data().begin(), logits.data().end());
  p.probabilities.assign(probs.data().begin(), probs.data().end());
  p.label = static_cast<std::size_t>(
      std::max_element(p.logits.begin(), p.logits.end()) - p.logits.begin());
  return p;
}

}  // namespace swinscan::swin
