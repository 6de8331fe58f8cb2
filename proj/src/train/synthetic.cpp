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
#include <random>

#include "swinscan/random.hpp"
#include "swinscan/train.hpp"

namespace swinscan::train {

namespace {

constexpr std::size_t kSide = 64;

// Low-amplitude background texture so blank images are not all equal.
void add_noise(data::Image& im, std::mt19937_64& g, double amplitude) {
  for (auto& v : im.pixels) v = std::clamp(v + amplitude * (rng::uniform01(g) - 0.5), 0.0, 1.0);
}

template <class Inside>
data::Image blob(double level, double background, Inside inside) {
  data::Image im = data::Image::blank(3, kSide, kSide, background);
  for (std::size_t y = 0; y < kSide; ++y)
    for (std::size_t x = 0; x < kSide; ++x)
      if (inside(y + 0.5, x + 0.5))
        for (std::size_t c = 0; c < 3; ++c) im.at(c, y, x) = level;
  return im;
}

}  // namespace

data::Image disk_image(std::size_t size, double cy, double cx, double radius, double level, double background) {
  data::Image im = data::Image::blank(3, size, size, background);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      const double dy = y + 0.5 - cy, dx = x + 0.5 - cx;
      if (dy * dy + dx * dx <= radius * radius)
        for (std::size_t c = 0; c < 3; ++c) im.at(c, y, x) = level;
    }
  return im;
}

data::Image shaded_disk_image(std::size_t size, double cy, double cx, double radius, double level,
                              double background) {
  data::Image im = data::Image::blank(3, size, size, background);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      const double dy = y + 0.5 - cy, dx = x + 0.5 - cx, d2 = (dy * dy + dx * dx) / (radius * radius);
      if (d2 <= 1.0)
        for (std::size_t c = 0; c < 3; ++c) im.at(c, y, x) = background + (level - background) * std::sqrt(1.0 - d2);
    }
  return im;
}

std::vector<data::Sample> synthetic_detection(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<data::Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool yes = i % 2 == 0;
    data::Image im = data::Image::blank(3, kSide, kSide, 0.05);
    if (yes) {
      // Separate statements: argument evaluation order is unspecified.
      const double cy = 32 + 8 * (rng::uniform01(g) - 0.5);
      const double cx = 32 + 8 * (rng::uniform01(g) - 0.5);
      const double radius = 10 + 6 * rng::uniform01(g);
      const double level = 0.85 + 0.1 * rng::uniform01(g);
      im = shaded_disk_image(kSide, cy, cx, radius, level);
    }
    add_noise(im, g, 0.06);
    out.push_back({std::move(im), yes ? 1u : 0u, "synthetic/detection/" + std::to_string(i), data::Task::kDetection});
  }
  return out;
}

std::vector<data::Sample> synthetic_classification(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<data::Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % 3;
    const double jy = 6 * (rng::uniform01(g) - 0.5), jx = 6 * (rng::uniform01(g) - 0.5);
    const double level = 0.85 + 0.1 * rng::uniform01(g);
    data::Image im;
    switch (label) {
      case 0:
        im = disk_image(kSide, 18 + jy, 18 + jx, 9, level);
        break;
      case 1:
        im = blob(level, 0.05, [&](double y, double x) { return std::abs(y - 32 - jy) <= 8 && std::abs(x - 32 - jx) <= 8; });
        break;
      default:
        im = blob(level, 0.05, [&](double y, double x) {
          const double dy = (y - 46 - jy) / 6, dx = (x - 44 - jx) / 14;
          return dy * dy + dx * dx <= 1.0;
        });
        break;
    }
    add_noise(im, g, 0.06);
    out.push_back({std::move(im), label, "synthetic/classification/" + std::to_string(i), data::Task::kClassification});
  }
  return out;
}

}  // namespace swinscan::train
