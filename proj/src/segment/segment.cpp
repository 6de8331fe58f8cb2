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

#include "swinscan/segment.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "swinscan/error.hpp"

namespace swinscan::segment {

RgbImage RgbImage::from_image(const data::Image& image) {
  if (image.channels != 3) throw InputError("expected a three-channel image");
  RgbImage out{image.height, image.width, std::vector<std::uint8_t>(3 * image.height * image.width)};
  for (std::size_t y = 0; y < image.height; ++y)
    for (std::size_t x = 0; x < image.width; ++x)
      for (std::size_t c = 0; c < 3; ++c) out.rgb[3 * (y * image.width + x) + c] = data::quantize(image.at(c, y, x));
  return out;
}

std::size_t Mask::count() const { return std::count(on.begin(), on.end(), std::uint8_t{1}); }

GrayImage to_grayscale(const RgbImage& image) {
  GrayImage g{image.height, image.width, std::vector<std::uint8_t>(image.height * image.width)};
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const unsigned r = image.rgb[3 * i], gr = image.rgb[3 * i + 1], b = image.rgb[3 * i + 2];
    // Non-negative, so adding half before truncation is half-away rounding.
    g.values[i] = static_cast<std::uint8_t>((299 * r + 587 * gr + 114 * b + 500) / 1000);
  }
  return g;
}

Histogram histogram(const GrayImage& gray) {
  Histogram h{};
  for (auto v : gray.values) ++h[v];
  return h;
}

int otsu_threshold(const GrayImage& gray) {
  if (gray.values.empty()) throw InputError("cannot threshold an empty image");
  return otsu_threshold(histogram(gray));
}

int otsu_threshold(const Histogram& hist) {
  using boost::multiprecision::int256_t;
  std::uint64_t n = 0, s = 0;
  int highest = -1;
  for (int t = 0; t < 256; ++t) {
    n += hist[t];
    s += hist[t] * static_cast<std::uint64_t>(t);
    if (hist[t]) highest = t;
  }
  if (n == 0) throw InputError("cannot threshold an empty histogram");

  // sigma_B^2 * n^2 = (n1*s0 - n0*s1)^2 / (n0*n1); candidates are compared
  // by cross-multiplying, so no rounding enters the argmax.
  int best = -1;
  int256_t best_num = 0, best_den = 1;
  std::uint64_t n0 = 0, s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = n - n0, s1 = s - s0;
    if (n0 == 0 || n1 == 0) continue;
    const int256_t diff = int256_t(n1) * s0 - int256_t(n0) * s1;
    const int256_t num = diff * diff, den = int256_t(n0) * n1;
    if (best < 0 || num * best_den > best_num * den) {
      best = t;
      best_num = num;
      best_den = den;
    }
  }
  return best < 0 ? highest : best;
}

Mask threshold_mask(const GrayImage& gray, int level) {
  if (level < 0 || level > 255) throw InputError("threshold level must lie in [0, 255], got " + std::to_string(level));
  Mask m{gray.height, gray.width, std::vector<std::uint8_t>(gray.values.size())};
  for (std::size_t i = 0; i < gray.values.size(); ++i) m.on[i] = gray.values[i] > level ? 1 : 0;
  return m;
}

namespace {

struct DisjointSet {
  std::vector<std::uint32_t> parent;
  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Components connected_components(const Mask& mask) {
  const std::size_t h = mask.height, w = mask.width;
  Components c{h, w, std::vector<std::uint32_t>(h * w, 0), {}};
  // First pass: provisional labels (1-based in the set, 0 reserved).
  DisjointSet ds;
  ds.make();
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (!mask.at(y, x)) continue;
      const std::uint32_t up = y ? c.labels[(y - 1) * w + x] : 0;
      const std::uint32_t left = x ? c.labels[y * w + x - 1] : 0;
      std::uint32_t l;
      if (up && left) {
        l = std::min(up, left);
        ds.unite(up, left);
      } else if (up || left) {
        l = up ? up : left;
      } else {
        l = ds.make();
      }
      c.labels[y * w + x] = l;
    }
  // Second pass: dense relabeling in raster order of first appearance.
  std::vector<std::uint32_t> dense(ds.parent.size(), 0);
  for (auto& l : c.labels) {
    if (!l) continue;
    const std::uint32_t root = ds.find(l);
    if (!dense[root]) {
      c.areas.push_back(0);
      dense[root] = static_cast<std::uint32_t>(c.areas.size());
    }
    l = dense[root];
    ++c.areas[l - 1];
  }
  return c;
}

SizeEstimate estimate_size(const Components& comp, std::optional<double> spacing) {
  SizeEstimate out;
  if (spacing && !(*spacing > 0.0 && std::isfinite(*spacing))) throw InputError("pixel spacing must be positive");
  if (comp.count() == 0) return out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < comp.areas.size(); ++i)
    if (comp.areas[i] > comp.areas[best]) best = i;
  const auto label = static_cast<std::uint32_t>(best + 1);

  BoundingBox box{comp.height, comp.width, 0, 0};
  double sy = 0, sx = 0;
  for (std::size_t y = 0; y < comp.height; ++y)
    for (std::size_t x = 0; x < comp.width; ++x) {
      if (comp.labels[y * comp.width + x] != label) continue;
      box.row0 = std::min(box.row0, y);
      box.col0 = std::min(box.col0, x);
      box.row1 = std::max(box.row1, y);
      box.col1 = std::max(box.col1, x);
      sy += static_cast<double>(y);
      sx += static_cast<double>(x);
    }
  out.found = true;
  out.label = label;
  out.area_px = comp.areas[best];
  out.bbox = box;
  const double a = static_cast<double>(out.area_px);
  out.centroid = std::array<double, 2>{sy / a, sx / a};
  if (spacing) out.area_mm2 = a * *spacing * *spacing;
  return out;
}

RgbImage highlight_yellow(const RgbImage& image, const Mask& mask, double alpha) {
  if (image.height != mask.height || image.width != mask.width)
    throw InputError("mask extents do not match the image");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  static constexpr double kYellow[3] = {255.0, 255.0, 0.0};
  RgbImage out = image;
  for (std::size_t i = 0; i < mask.on.size(); ++i) {
    if (!mask.on[i]) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = (1.0 - alpha) * image.rgb[3 * i + c] + alpha * kYellow[c];
      out.rgb[3 * i + c] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

SegmentationResult segment(const RgbImage& image, std::optional<double> spacing, double alpha) {
  SegmentationResult r;
  const GrayImage gray = to_grayscale(image);
  r.level = otsu_threshold(gray);
  r.mask = threshold_mask(gray, r.level);
  const Components comp = connected_components(r.mask);
  r.size = estimate_size(comp, spacing);
  // Only the reported region is highlighted.
  Mask region{image.height, image.width, std::vector<std::uint8_t>(r.mask.on.size(), 0)};
  if (r.size.found)
    for (std::size_t i = 0; i < region.on.size(); ++i) region.on[i] = comp.labels[i] == r.size.label;
  r.highlighted = highlight_yellow(image, region, alpha);
  return r;
}

std::vector<std::uint8_t> encode_p6(const RgbImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

std::vector<std::uint8_t> encode_p5(const Mask& mask) {
  const std::string header = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (auto v : mask.on) out.push_back(v ? 255 : 0);
  return out;
}

}  // namespace swinscan::segment
