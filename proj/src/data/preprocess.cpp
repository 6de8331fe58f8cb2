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

#include "swinscan/data.hpp"
#include "swinscan/error.hpp"
#include "swinscan/random.hpp"

namespace swinscan::data {

namespace {

struct Tap {
  std::size_t lo, hi;
  double frac;
};

// Source taps for each output position along one axis.
std::vector<Tap> taps(std::size_t in, std::size_t out) {
  std::vector<Tap> t(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double s = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(s));
    t[i] = {lo, std::min(lo + 1, in - 1), s - static_cast<double>(lo)};
  }
  return t;
}

}  // namespace

Image resize_bilinear(const Image& image, std::size_t height, std::size_t width) {
  if (image.height == 0 || image.width == 0 || image.channels == 0) throw InputError("cannot resize an empty image");
  if (height == 0 || width == 0) throw InputError("resize target must be non-empty");
  if (image.height == height && image.width == width) return image;

  const auto ty = taps(image.height, height);
  const auto tx = taps(image.width, width);
  // Horizontal pass, then vertical.
  Image mid = Image::blank(image.channels, image.height, width);
  for (std::size_t c = 0; c < image.channels; ++c)
    for (std::size_t y = 0; y < image.height; ++y)
      for (std::size_t x = 0; x < width; ++x) {
        const auto& t = tx[x];
        const double a = image.at(c, y, t.lo), b = image.at(c, y, t.hi);
        mid.at(c, y, x) = t.frac == 0.0 ? a : a + (b - a) * t.frac;
      }
  Image out = Image::blank(image.channels, height, width);
  for (std::size_t c = 0; c < image.channels; ++c)
    for (std::size_t y = 0; y < height; ++y) {
      const auto& t = ty[y];
      for (std::size_t x = 0; x < width; ++x) {
        const double a = mid.at(c, t.lo, x), b = mid.at(c, t.hi, x);
        out.at(c, y, x) = t.frac == 0.0 ? a : a + (b - a) * t.frac;
      }
    }
  return out;
}

void PreprocessConfig::validate() const {
  if (resample != "bilinear") throw ConfigError("unsupported resample mode '" + resample + "'");
  for (double s : image_std)
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("image_std entries must be positive");
  for (double m : image_mean)
    if (!std::isfinite(m)) throw ConfigError("image_mean entries must be finite");
  if (target_size != 64) throw ConfigError("target_size must be 64");
}

Image normalize(const Image& image, const PreprocessConfig& config) {
  config.validate();
  if (image.channels != 3) throw InputError("normalize expects three channels");
  Image out = image;
  const std::size_t plane = image.height * image.width;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < plane; ++i) {
      double& v = out.pixels[c * plane + i];
      v = (v - config.image_mean[c]) / config.image_std[c];
    }
  return out;
}

Image denormalize(const Image& image, const PreprocessConfig& config) {
  config.validate();
  if (image.channels != 3) throw InputError("denormalize expects three channels");
  Image out = image;
  const std::size_t plane = image.height * image.width;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < plane; ++i) {
      double& v = out.pixels[c * plane + i];
      v = v * config.image_std[c] + config.image_mean[c];
    }
  return out;
}

Image prepare(const Image& image, const PreprocessConfig& config) {
  config.validate();
  return resize_bilinear(image, config.target_size, config.target_size);
}

Image hflip(const Image& image) {
  Image out = image;
  for (std::size_t c = 0; c < image.channels; ++c)
    for (std::size_t y = 0; y < image.height; ++y)
      for (std::size_t x = 0; x < image.width; ++x) out.at(c, y, x) = image.at(c, y, image.width - 1 - x);
  return out;
}

Image rotate90(const Image& image, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return image;
  const bool swap = k % 2 == 1;
  Image out = Image::blank(image.channels, swap ? image.width : image.height, swap ? image.height : image.width);
  const std::size_t h = image.height, w = image.width;
  for (std::size_t c = 0; c < image.channels; ++c)
    for (std::size_t y = 0; y < out.height; ++y)
      for (std::size_t x = 0; x < out.width; ++x) {
        double v = 0;
        switch (k) {
          case 1:  // counter-clockwise: out(y, x) = in(x, w-1-y)
            v = image.at(c, x, w - 1 - y);
            break;
          case 2:
            v = image.at(c, h - 1 - y, w - 1 - x);
            break;
          case 3:
            v = image.at(c, h - 1 - x, y);
            break;
        }
        out.at(c, y, x) = v;
      }
  return out;
}

Image pad_reflect(const Image& image, std::size_t pad) {
  if (pad == 0) return image;
  if (pad >= image.height || pad >= image.width) throw InputError("reflect pad must be smaller than the image");
  auto mirror = [](long i, long n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
  };
  Image out = Image::blank(image.channels, image.height + 2 * pad, image.width + 2 * pad);
  const long p = static_cast<long>(pad), h = static_cast<long>(image.height), w = static_cast<long>(image.width);
  for (std::size_t c = 0; c < image.channels; ++c)
    for (std::size_t y = 0; y < out.height; ++y)
      for (std::size_t x = 0; x < out.width; ++x)
        out.at(c, y, x) = image.at(c, mirror(long(y) - p, h), mirror(long(x) - p, w));
  return out;
}

Image center_crop(const Image& image, std::size_t height, std::size_t width) {
  if (height > image.height || width > image.width || height == 0 || width == 0)
    throw InputError("crop extent exceeds image");
  const std::size_t y0 = (image.height - height) / 2, x0 = (image.width - width) / 2;
  Image out = Image::blank(image.channels, height, width);
  for (std::size_t c = 0; c < image.channels; ++c)
    for (std::size_t y = 0; y < height; ++y)
      for (std::size_t x = 0; x < width; ++x) out.at(c, y, x) = image.at(c, y0 + y, x0 + x);
  return out;
}

Sample augment(const Sample& sample, std::mt19937_64& g, const AugmentConfig& config) {
  Sample out = sample;
  if (rng::uniform01(g) < config.flip_probability) out.image = hflip(out.image);
  out.image = rotate90(out.image, static_cast<int>(rng::uniform_below(g, 4)));
  // With a 4-pixel pad and a crop back to the input size this stage is the
  // identity on the pixels; it is kept so non-default crops behave.
  out.image = center_crop(pad_reflect(out.image, config.pad), config.crop, config.crop);
  return out;
}

}  // namespace swinscan::data
