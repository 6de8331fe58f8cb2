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
#include <cstring>
#include <filesystem>
#include <random>
#include <set>

#include "../support/gradcheck.hpp"
#include "doctest.h"
#include "swinscan/error.hpp"
#include "swinscan/ops.hpp"
#include "swinscan/swin.hpp"
#include "swinscan/weights_io.hpp"

using namespace swinscan;
using namespace swinscan::swin;
using swinscan::testing::random_tensor;

namespace {

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

// Tokens whose value encodes their (row, col, channel) position.
Tensor labeled_grid(std::size_t b, std::size_t h, std::size_t w, std::size_t c) {
  std::vector<double> v(b * h * w * c);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  return Tensor::from({b, h, w, c}, v);
}

AttentionParams random_attention(std::size_t c, std::size_t heads, std::size_t w,
                                 std::mt19937_64& rng, bool zero_bias) {
  const std::size_t span = 2 * w - 1;
  AttentionParams p;
  p.qkv_weight = random_tensor({c, 3 * c}, rng, -0.5, 0.5);
  p.qkv_bias = random_tensor({3 * c}, rng, -0.1, 0.1);
  p.bias_table = zero_bias ? Tensor::zeros({span * span, heads}) : random_tensor({span * span, heads}, rng);
  p.proj_weight = random_tensor({c, c}, rng, -0.5, 0.5);
  p.proj_bias = random_tensor({c}, rng, -0.1, 0.1);
  p.num_heads = heads;
  return p;
}

// Dense multi-head attention over all L tokens, computed with plain loops.
std::vector<double> dense_attention(const std::vector<double>& x, std::size_t l, std::size_t c,
                                    const AttentionParams& p) {
  const std::size_t heads = p.num_heads, d = c / heads;
  auto W = p.qkv_weight.data();
  auto B = p.qkv_bias.data();
  std::vector<double> qkv(l * 3 * c);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t o = 0; o < 3 * c; ++o) {
      double s = B[o];
      for (std::size_t k = 0; k < c; ++k) s += x[i * c + k] * W[k * 3 * c + o];
      qkv[i * 3 * c + o] = s;
    }
  std::vector<double> ctx(l * c, 0.0);
  for (std::size_t h = 0; h < heads; ++h)
    for (std::size_t i = 0; i < l; ++i) {
      std::vector<double> sc(l);
      double mx = -1e300;
      for (std::size_t j = 0; j < l; ++j) {
        double s = 0;
        for (std::size_t e = 0; e < d; ++e) s += qkv[i * 3 * c + h * d + e] * qkv[j * 3 * c + c + h * d + e];
        sc[j] = s / std::sqrt(double(d));
        mx = std::max(mx, sc[j]);
      }
      double z = 0;
      for (auto& s : sc) z += (s = std::exp(s - mx));
      for (std::size_t j = 0; j < l; ++j)
        for (std::size_t e = 0; e < d; ++e)
          ctx[i * c + h * d + e] += sc[j] / z * qkv[j * 3 * c + 2 * c + h * d + e];
    }
  std::vector<double> out(l * c);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t o = 0; o < c; ++o) {
      double s = p.proj_bias.data()[o];
      for (std::size_t k = 0; k < c; ++k) s += ctx[i * c + k] * p.proj_weight.data()[k * c + o];
      out[i * c + o] = s;
    }
  return out;
}

// Region id of a token sitting at shifted position (r, c): which of the two
// sides of the wrap-around seam it came from, per axis.
std::size_t wrap_region(std::size_t r, std::size_t c, std::size_t h, std::size_t w, std::size_t shift) {
  return (r + shift >= h ? 2 : 0) + (c + shift >= w ? 1 : 0);
}

SwinConfig tiny_config(std::size_t classes = 2) {
  SwinConfig c;
  c.image_size = 16;
  c.patch_size = 2;
  c.embed_dim = 8;
  c.depths = {2, 2};
  c.num_heads = {2, 2};
  c.window_size = 4;
  c.shift_size = 2;
  c.mlp_ratio = 2.0;
  c.num_classes = classes;
  return c;
}


// Initialized weights with a random classifier head, so gradients reach
// the body on the first backward pass.
ModelWeights with_random_head(const ModelWeights& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<std::string, Tensor> p;
  for (const auto& [name, t] : w.params()) p.emplace(name, t.clone());
  p["head.weight"] = swinscan::testing::random_tensor(p["head.weight"].shape(), rng, -0.05, 0.05);
  return ModelWeights(w.config(), p);
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(SwinConfig::detection().validate());
  CHECK_NOTHROW(SwinConfig::classification().validate());
  CHECK(SwinConfig::detection().grid_side(0) == 16);
  CHECK(SwinConfig::detection().grid_side(1) == 8);
  auto bad = SwinConfig::detection();
  bad.shift_size = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SwinConfig::detection();
  bad.num_classes = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SwinConfig::detection();
  bad.image_size = 62;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SwinConfig::detection();
  bad.window_size = 3;
  bad.shift_size = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SwinConfig::detection();
  bad.num_heads = {3, 4};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("patch_embed") {
  auto w = ModelWeights::initialize(SwinConfig::detection(), 1);
  std::mt19937_64 rng(2);
  SUBCASE("64x64 with patch 4 gives 256 tokens") {
    Tensor t = patch_embed(random_tensor({1, 3, 64, 64}, rng), w);
    CHECK(t.shape() == Shape{1, 16, 16, 32});
    CHECK(t.numel() / 32 == 256);
  }
  SUBCASE("zero image yields the bias everywhere") {
    std::map<std::string, Tensor> p = w.params();
    p["patch_embed.proj.bias"] = random_tensor({32}, rng);
    ModelWeights wb(w.config(), p);
    Tensor t = patch_embed(Tensor::zeros({1, 3, 64, 64}), wb);
    for (std::size_t i = 0; i < t.numel(); ++i) CHECK(t.data()[i] == p["patch_embed.proj.bias"].data()[i % 32]);
  }
  SUBCASE("linearity in the image") {
    std::map<std::string, Tensor> p = w.params();
    p["patch_embed.proj.bias"] = random_tensor({32}, rng);
    ModelWeights wb(w.config(), p);
    Tensor img = random_tensor({1, 3, 64, 64}, rng);
    Tensor t1 = patch_embed(img, wb);
    Tensor t2 = patch_embed(ops::scale(img, 2.0), wb);
    auto bias = p["patch_embed.proj.bias"].data();
    for (std::size_t i = 0; i < t1.numel(); ++i) {
      CHECK(std::abs((t2.data()[i] - bias[i % 32]) - 2.0 * (t1.data()[i] - bias[i % 32])) <= 1e-12);
    }
  }
  SUBCASE("patch flattening is channel, row, column") {
    std::vector<double> img(3 * 64 * 64, 0.0);
    // Marker at channel 1, row 5, col 6: patch (1, 1), in-patch offset (1, 2).
    img[(1 * 64 + 5) * 64 + 6] = 1.0;
    std::map<std::string, Tensor> p = w.params();
    std::vector<double> proj(48 * 32, 0.0);
    const std::size_t feature = 1 * 16 + 1 * 4 + 2;
    proj[feature * 32 + 0] = 1.0;
    p["patch_embed.proj.weight"] = Tensor::from({48, 32}, proj);
    ModelWeights wb(w.config(), p);
    Tensor t = patch_embed(Tensor::from({1, 3, 64, 64}, img), wb);
    for (std::size_t tok = 0; tok < 256; ++tok) CHECK(t.data()[tok * 32] == (tok == 1 * 16 + 1 ? 1.0 : 0.0));
  }
  SUBCASE("wrong channel count") {
    CHECK_THROWS_AS(patch_embed(Tensor::zeros({1, 1, 64, 64}), w), InputError);
  }
}

TEST_CASE("window_partition and window_reverse") {
  std::mt19937_64 rng(3);
  Tensor g = labeled_grid(1, 16, 16, 2);
  Tensor win = window_partition(g, 8);
  CHECK(win.shape() == Shape{4, 64, 2});
  // Window 1 is the top-right block; its first token is grid (0, 8).
  CHECK(win.data()[1 * 64 * 2] == g.data()[(0 * 16 + 8) * 2]);
  // Token 9 of window 2 is grid (8 + 1, 0 + 1).
  CHECK(win.data()[(2 * 64 + 9) * 2] == g.data()[(9 * 16 + 1) * 2]);

  Tensor whole = window_partition(g, 16);
  CHECK(whole.shape() == Shape{1, 256, 2});
  CHECK(values(whole) == values(g));

  Tensor r = random_tensor({2, 8, 8, 4}, rng);
  CHECK(values(window_reverse(window_partition(r, 4), 8, 8, 4)) == values(r));
  CHECK(values(window_reverse(window_partition(r, 8), 8, 8, 8)) == values(r));

  // Swapping two windows must not survive the reverse.
  Tensor parts = window_partition(r, 4);
  auto swapped = values(parts);
  const std::size_t stride = 16 * 4;
  std::swap_ranges(swapped.begin(), swapped.begin() + stride, swapped.begin() + stride);
  CHECK(values(window_reverse(Tensor::from(parts.shape(), swapped), 8, 8, 4)) != values(r));

  CHECK_THROWS_AS(window_partition(g, 5), ConfigError);
  CHECK_THROWS_AS(window_reverse(Tensor::zeros({3, 16, 2}), 8, 8, 4), DimensionError);
}

TEST_CASE("cyclic_shift") {
  std::mt19937_64 rng(4);
  Tensor r = random_tensor({1, 8, 8, 3}, rng);
  CHECK(values(cyclic_shift(r, 0, 0)) == values(r));
  CHECK(values(cyclic_shift(cyclic_shift(r, 2, 3), -2, -3)) == values(r));
  CHECK(values(cyclic_shift(cyclic_shift(r, 9, -1), -9, 1)) == values(r));
  // [[a, b], [c, d]] shifted by (1, 1) -> [[d, c], [b, a]].
  Tensor abcd = Tensor::from({1, 2, 2, 1}, {1, 2, 3, 4});
  CHECK(values(cyclic_shift(abcd, 1, 1)) == std::vector<double>{4, 3, 2, 1});
}

TEST_CASE("build_shift_mask") {
  SUBCASE("zero shift gives zero masks") {
    auto m = build_shift_mask(8, 8, 4, 0);
    CHECK(m.windows == 4);
    CHECK(m.all_zero());
  }
  SUBCASE("masks agree with the wrap-region oracle") {
    for (auto [h, w, win, s] : std::vector<std::array<std::size_t, 4>>{
             {4, 4, 4, 2}, {8, 8, 4, 2}, {16, 16, 4, 2}, {12, 8, 4, 1}, {8, 8, 4, 3}}) {
      auto m = build_shift_mask(h, w, win, s);
      const std::size_t cols = w / win;
      for (std::size_t k = 0; k < m.windows; ++k)
        for (std::size_t i = 0; i < m.tokens; ++i)
          for (std::size_t j = 0; j < m.tokens; ++j) {
            const std::size_t ri = (k / cols) * win + i / win, ci = (k % cols) * win + i % win;
            const std::size_t rj = (k / cols) * win + j / win, cj = (k % cols) * win + j % win;
            const bool same = wrap_region(ri, ci, h, w, s) == wrap_region(rj, cj, h, w, s);
            CHECK(m.at(k, i, j) == (same ? 0.0 : AttentionMask::kBlocked));
            CHECK(m.at(k, i, j) == m.at(k, j, i));
          }
    }
  }
  SUBCASE("single 4x4 window with shift 2 splits into quadrants") {
    auto m = build_shift_mask(4, 4, 4, 2);
    std::set<std::vector<double>> rows;
    for (std::size_t i = 0; i < 16; ++i) {
      std::vector<double> row(16);
      for (std::size_t j = 0; j < 16; ++j) row[j] = m.at(0, i, j);
      rows.insert(row);
      std::size_t open = 0;
      for (double v : row) open += v == 0.0;
      CHECK(open == 4);
    }
    CHECK(rows.size() == 4);
  }
  SUBCASE("8x8, window 4, shift 2: only boundary windows are masked") {
    auto m = build_shift_mask(8, 8, 4, 2);
    auto nonzero = [&](std::size_t k) {
      for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j)
          if (m.at(k, i, j) != 0.0) return true;
      return false;
    };
    CHECK_FALSE(nonzero(0));
    CHECK(nonzero(1));
    CHECK(nonzero(2));
    CHECK(nonzero(3));
  }
}

TEST_CASE("relative_bias_index") {
  CHECK(relative_bias_index(1) == std::vector<std::size_t>{0});
  auto i2 = relative_bias_index(2);
  CHECK(std::set<std::size_t>(i2.begin(), i2.end()).size() == 9);
  const std::size_t w = 3, l = 9;
  auto idx = relative_bias_index(w);
  std::map<std::pair<long, long>, std::set<std::size_t>> by_offset;
  std::map<std::size_t, std::set<std::pair<long, long>>> by_index;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) {
      std::pair<long, long> off{long(i / w) - long(j / w), long(i % w) - long(j % w)};
      by_offset[off].insert(idx[i * l + j]);
      by_index[idx[i * l + j]].insert(off);
      CHECK(idx[i * l + j] < (2 * w - 1) * (2 * w - 1));
    }
  for (auto& [off, ids] : by_offset) CHECK(ids.size() == 1);
  for (auto& [id, offs] : by_index) CHECK(offs.size() == 1);
  CHECK(by_offset.size() == 25);
}

TEST_CASE("window_attention") {
  std::mt19937_64 rng(5);
  SUBCASE("single-token window returns the projected value") {
    const std::size_t c = 4;
    auto p = random_attention(c, 2, 1, rng, false);
    Tensor x = random_tensor({3, 1, c}, rng);
    Tensor y = window_attention(x, p, 1, nullptr);
    Tensor qkv = ops::linear(x, p.qkv_weight, p.qkv_bias);
    Tensor v = ops::narrow(qkv, 2, 2 * c, c);
    Tensor expected = ops::linear(v, p.proj_weight, p.proj_bias);
    for (std::size_t i = 0; i < y.numel(); ++i) CHECK(std::abs(y.data()[i] - expected.data()[i]) <= 1e-12);
  }
  SUBCASE("full-grid window equals dense attention") {
    for (auto [side, c, heads] : std::vector<std::array<std::size_t, 3>>{{4, 8, 2}, {8, 6, 3}, {2, 4, 1}}) {
      auto p = random_attention(c, heads, side, rng, true);
      Tensor grid = random_tensor({1, side, side, c}, rng);
      Tensor y = window_attention(window_partition(grid, side), p, side, nullptr);
      auto ref = dense_attention(values(grid), side * side, c, p);
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(y.data()[i] - ref[i]) <= 1e-6);
    }
  }
  SUBCASE("attention rows sum to one") {
    auto p = random_attention(8, 2, 4, rng, false);
    auto mask = build_shift_mask(8, 8, 4, 2);
    AttentionTrace trace;
    window_attention(window_partition(random_tensor({2, 8, 8, 8}, rng), 4), p, 4, &mask, &trace);
    const auto probs = trace.probabilities.data();
    for (std::size_t r = 0; r < probs.size() / 16; ++r) {
      double s = 0;
      for (std::size_t j = 0; j < 16; ++j) s += probs[r * 16 + j];
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
  SUBCASE("head divisibility") {
    auto p = random_attention(6, 4, 2, rng, false);
    CHECK_THROWS_AS(window_attention(Tensor::zeros({1, 4, 6}), p, 2, nullptr), ConfigError);
  }
}

TEST_CASE("patch merging") {
  Tensor g = Tensor::zeros({1, 16, 16, 3});
  Tensor merged = merge_neighborhoods(g);
  CHECK(merged.shape() == Shape{1, 8, 8, 12});
  CHECK(merged.numel() / 12 * 4 == 256);

  // Each 2x2 quadrant position carries a distinct constant.
  std::vector<double> v(4 * 4 * 2);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t ch = 0; ch < 2; ++ch) {
        const double q = (r % 2 == 0 && c % 2 == 0) ? 10 : (r % 2 == 1 && c % 2 == 0) ? 20
                         : (r % 2 == 0) ? 30 : 40;
        v[(r * 4 + c) * 2 + ch] = q + ch;
      }
  Tensor m = merge_neighborhoods(Tensor::from({1, 4, 4, 2}, v));
  const std::vector<double> slots{10, 11, 20, 21, 30, 31, 40, 41};
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t k = 0; k < 8; ++k) CHECK(m.data()[t * 8 + k] == slots[k]);

  std::mt19937_64 rng(6);
  Tensor y = patch_merging(random_tensor({2, 16, 16, 4}, rng), Tensor::full({16}, 1.0), Tensor::zeros({16}),
                           random_tensor({16, 8}, rng));
  CHECK(y.shape() == Shape{2, 8, 8, 8});
  CHECK_THROWS_AS(merge_neighborhoods(Tensor::zeros({1, 5, 4, 2})), ConfigError);
}

TEST_CASE("shift mask keeps region-constant inputs region-constant") {
  std::mt19937_64 rng(7);
  const std::size_t h = 8, w = 8, win = 4, s = 2, c = 8;
  auto p = random_attention(c, 2, win, rng, false);
  auto mask = build_shift_mask(h, w, win, s);
  // Constant vector per (window, region) on the shifted grid.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> reps;
  std::vector<double> grid(h * w * c);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col) {
      auto key = std::make_pair((r / win) * (w / win) + col / win, wrap_region(r, col, h, w, s));
      if (!reps.count(key)) reps[key] = values(random_tensor({c}, rng));
      std::copy(reps[key].begin(), reps[key].end(), grid.begin() + (r * w + col) * c);
    }
  Tensor out = window_attention(window_partition(Tensor::from({1, h, w, c}, grid), win), p, win, &mask);
  Tensor back = window_reverse(out, h, w, win);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> seen;
  double worst = 0;
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col) {
      auto key = std::make_pair((r / win) * (w / win) + col / win, wrap_region(r, col, h, w, s));
      std::vector<double> tok(back.data().begin() + (r * w + col) * c, back.data().begin() + (r * w + col + 1) * c);
      if (!seen.count(key)) seen[key] = tok;
      for (std::size_t k = 0; k < c; ++k) worst = std::max(worst, std::abs(tok[k] - seen[key][k]));
    }
  CHECK(worst <= 1e-9);
}

TEST_CASE("attention cost grows linearly with grid area") {
  std::mt19937_64 rng(8);
  auto p = random_attention(8, 2, 4, rng, false);
  auto count = [&](std::size_t side) {
    AttentionTrace trace;
    auto mask = build_shift_mask(side, side, 4, 2);
    window_attention(window_partition(random_tensor({1, side, side, 8}, rng), 4), p, 4, &mask, &trace);
    return trace.score_macs;
  };
  CHECK(count(32) == 4 * count(16));
}

TEST_CASE("forward_classify") {
  std::mt19937_64 rng(9);
  Tensor img = random_tensor({3, 64, 64}, rng);
  auto det = ModelWeights::initialize(SwinConfig::detection(), 10);
  auto cls = ModelWeights::initialize(SwinConfig::classification(), 11);
  auto pd = forward_classify(det, img);
  auto pc = forward_classify(cls, img);
  CHECK(pd.logits.size() == 2);
  CHECK(pc.logits.size() == 3);
  for (const auto* p : {&pd, &pc}) {
    double s = 0;
    for (double v : p->probabilities) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  auto again = forward_classify(det, img);
  CHECK(std::memcmp(again.logits.data(), pd.logits.data(), 2 * sizeof(double)) == 0);
  CHECK_THROWS_AS(forward_classify(det, Tensor::zeros({3, 32, 32})), InputError);
}

TEST_CASE("every parameter receives a nonzero gradient") {
  std::mt19937_64 rng(12);
  for (auto cfg : {tiny_config(2), SwinConfig::classification()}) {
    auto w = with_random_head(ModelWeights::initialize(cfg, 13), 14);
    w.set_trainable(true);
    Tensor imgs = random_tensor({2, 3, cfg.image_size, cfg.image_size}, rng);
    std::vector<std::size_t> labels{0, 1};
    Tape tape;
    {
      Tape::Recording rec(tape);
      backward(tape, ops::cross_entropy(forward(w, imgs), labels));
    }
    for (const auto& [name, t] : w.params()) {
      bool any = false;
      for (double g : t.grad()) any |= g != 0.0;
      INFO(name);
      CHECK(any);
    }
  }
}

TEST_CASE("weight file round trip and failures") {
  auto w = ModelWeights::initialize(SwinConfig::classification(), 21);
  auto bytes = serialize_weights(w);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SWNW");
  auto back = deserialize_weights(bytes, SwinConfig::classification());
  CHECK(back.config() == w.config());
  CHECK(back.params().size() == w.params().size());
  for (const auto& [name, t] : w.params()) {
    const Tensor& u = back.at(name);
    CHECK(u.shape() == t.shape());
    CHECK(std::memcmp(u.data().data(), t.data().data(), t.numel() * sizeof(double)) == 0);
  }
  CHECK(serialize_weights(back) == bytes);

  auto corrupt = bytes;
  corrupt[1] = 'X';
  CHECK_THROWS_AS(deserialize_weights(corrupt), FormatError);
  auto badver = bytes;
  badver[4] = 9;
  try {
    deserialize_weights(badver);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + bytes.size() / 2);
  try {
    deserialize_weights(cut);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() > 0);
    CHECK(e.offset() <= cut.size());
  }
  CHECK_THROWS_AS(deserialize_weights(bytes, SwinConfig::detection()), ConfigError);

  auto path = std::filesystem::temp_directory_path() / "swinscan_test_weights.swnw";
  save_weights(w, path);
  auto loaded = load_weights(path);
  CHECK(serialize_weights(loaded) == bytes);
  std::filesystem::remove(path);
}
