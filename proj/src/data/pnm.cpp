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
#include <fstream>
#include <iterator>
#include <string>

#include "swinscan/data.hpp"
#include "swinscan/error.hpp"

namespace swinscan::data {

Image Image::blank(std::size_t channels, std::size_t height, std::size_t width, double fill) {
  return Image{channels, height, width, std::vector<double>(channels * height * width, fill)};
}

namespace {

bool is_space(std::uint8_t b) { return b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' || b == '\f'; }

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }
  std::size_t last_start() const { return last_start_; }
  bool done() const { return pos_ >= bytes_.size(); }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  // Decimal token; header fields allow comments in between.
  unsigned long number(const char* what, bool comments = true) {
    if (comments) {
      skip_space_and_comments();
    } else {
      while (pos_ < bytes_.size() && is_space(bytes_[pos_])) ++pos_;
    }
    if (done()) throw ParseError(std::string("truncated before ") + what, pos_);
    const std::size_t start = last_start_ = pos_;
    unsigned long v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000UL) throw ParseError(std::string(what) + " out of range", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
    if (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#')
      throw ParseError(std::string("malformed ") + what, pos_);
    return v;
  }

  std::uint8_t byte() { return bytes_[pos_++]; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t last_start_ = 0;
};

}  // namespace

Image load_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] < '2' || bytes[1] > '6' || bytes[1] == '4')
    throw ParseError("bad PNM magic", 0);
  const int kind = bytes[1] - '0';
  const bool color = kind == 3 || kind == 6;
  const bool binary = kind >= 5;

  Reader r(bytes, 2);
  const auto width = r.number("width");
  const auto height = r.number("height");
  const std::size_t extent_at = r.last_start();
  const auto maxval = r.number("maxval");
  const std::size_t maxval_at = r.last_start();
  if (width == 0 || height == 0) throw ParseError("zero image extent", extent_at);
  if (maxval == 0 || maxval > 255) throw ParseError("maxval must be in [1, 255]", maxval_at);

  const std::size_t in_ch = color ? 3 : 1;
  const std::size_t count = width * height * in_ch;
  std::vector<unsigned> raw(count);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (r.done() || !is_space(r.byte())) throw ParseError("missing raster separator", r.pos());
    if (r.remaining() < count) throw ParseError("truncated raster", bytes.size());
    for (auto& v : raw) {
      const std::size_t at = r.pos();
      v = r.byte();
      if (v > maxval) throw ParseError("sample exceeds maxval", at);
    }
  } else {
    for (auto& v : raw) {
      v = static_cast<unsigned>(r.number("sample"));
      if (v > maxval) throw ParseError("sample exceeds maxval", r.last_start());
    }
  }

  Image img = Image::blank(3, height, width);
  const double scale = static_cast<double>(maxval);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        const unsigned v = raw[(y * width + x) * in_ch + (color ? c : 0)];
        img.at(c, y, x) = static_cast<double>(v) / scale;
      }
  return img;
}

Image load_pnm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_pnm(bytes);
}

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

std::vector<std::uint8_t> write_pnm(const Image& image, PnmKind kind) {
  if (image.height == 0 || image.width == 0 || image.channels == 0) throw InputError("empty image");
  const bool color = kind == PnmKind::kP3 || kind == PnmKind::kP6;
  const bool binary = kind == PnmKind::kP5 || kind == PnmKind::kP6;
  if (color && image.channels < 3) throw InputError("colour PNM needs three channels");

  std::string header = "P" + std::to_string(static_cast<int>(kind)) + "\n" + std::to_string(image.width) + " " +
                       std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t ch = color ? 3 : 1;
  std::string line;
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x)
      for (std::size_t c = 0; c < ch; ++c) {
        const std::uint8_t q = quantize(image.at(c, y, x));
        if (binary) {
          out.push_back(q);
        } else {
          if (!line.empty()) line += ' ';
          line += std::to_string(q);
        }
      }
    if (!binary) {
      line += '\n';
      out.insert(out.end(), line.begin(), line.end());
      line.clear();
    }
  }
  return out;
}

}  // namespace swinscan::data
