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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "swinscan/data.hpp"

namespace swinscan::segment {

/// Interleaved 8-bit RGB.
struct RgbImage {
  std::size_t height = 0, width = 0;
  std::vector<std::uint8_t> rgb;

  static RgbImage from_image(const data::Image& image);  // quantizes [0,1] floats
  std::array<std::uint8_t, 3> at(std::size_t y, std::size_t x) const {
    const std::size_t i = 3 * (y * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  bool operator==(const RgbImage&) const = default;
};

struct GrayImage {
  std::size_t height = 0, width = 0;
  std::vector<std::uint8_t> values;
  std::uint8_t at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

struct Mask {
  std::size_t height = 0, width = 0;
  std::vector<std::uint8_t> on;  // 0 or 1
  std::size_t count() const;
  bool at(std::size_t y, std::size_t x) const { return on[y * width + x] != 0; }
};

/// Y = round(0.299 R + 0.587 G + 0.114 B), half away from zero, in exact
/// integer arithmetic.
GrayImage to_grayscale(const RgbImage& image);

using Histogram = std::array<std::uint64_t, 256>;
Histogram histogram(const GrayImage& gray);

/// Otsu's level: maximizes between-class variance of {<= t} vs {> t} over
/// t in [0, 255], compared exactly; ties go to the lowest t. With fewer
/// than two occupied levels every split is degenerate and the result is
/// the highest occupied level, so the mask comes out empty.
/// InputError on an empty image.
int otsu_threshold(const GrayImage& gray);
int otsu_threshold(const Histogram& hist);

/// mask = intensity > level. Level must lie in [0, 255] (InputError).
Mask threshold_mask(const GrayImage& gray, int level);

struct Components {
  std::size_t height = 0, width = 0;
  std::vector<std::uint32_t> labels;  // 0 = background, else 1..count
  std::vector<std::size_t> areas;     // areas[label - 1]
  std::size_t count() const { return areas.size(); }
};

/// 4-connected labeling, labels numbered from 1 in raster order of each
/// component's first pixel.
Components connected_components(const Mask& mask);

struct BoundingBox {
  std::size_t row0, col0, row1, col1;  // inclusive
  bool operator==(const BoundingBox&) const = default;
};

struct SizeEstimate {
  bool found = false;  // false: "no region found", area 0
  std::uint32_t label = 0;
  std::size_t area_px = 0;
  std::optional<double> area_mm2;
  std::optional<BoundingBox> bbox;
  std::optional<std::array<double, 2>> centroid;  // (row, col)
};

/// Largest component (ties to the smallest label). area_mm2 is filled
/// only when a positive pixel spacing is given.
SizeEstimate estimate_size(const Components& components, std::optional<double> pixel_spacing_mm = std::nullopt);

/// Masked pixels become round((1 - alpha) * src + alpha * (255, 255, 0)),
/// half up; others are copied. InputError on extent mismatch or alpha
/// outside [0, 1].
RgbImage highlight_yellow(const RgbImage& image, const Mask& mask, double alpha = 0.5);

struct SegmentationResult {
  int level = 0;
  Mask mask;
  SizeEstimate size;
  RgbImage highlighted;
};

/// grayscale -> Otsu -> threshold -> components -> largest region ->
/// highlight.
SegmentationResult segment(const RgbImage& image, std::optional<double> pixel_spacing_mm = std::nullopt,
                           double alpha = 0.5);

std::vector<std::uint8_t> encode_p6(const RgbImage& image);
std::vector<std::uint8_t> encode_p5(const Mask& mask);  // 255 for set pixels

}  // namespace swinscan::segment
