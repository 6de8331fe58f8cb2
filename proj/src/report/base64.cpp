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

#include "swinscan/report/base64.hpp"

#include <array>

#include "swinscan/error.hpp"

namespace swinscan::report {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_table() {
  std::array<int, 256> t{};
  for (auto& v : t) v = -1;
  for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kAlphabet[i])] = i;
  return t;
}
constexpr auto kTable = make_table();

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; }

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(v >> s) & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t quad = 0;
  int filled = 0, padding = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_space(c)) continue;
    last = i;
    if (c == '=') {
      if (filled < 2) throw ParseError("misplaced base64 padding", i);
      ++padding;
      quad <<= 6;
      ++filled;
    } else {
      const int v = kTable[static_cast<unsigned char>(c)];
      if (v < 0) throw ParseError("invalid base64 character", i);
      if (padding) throw ParseError("data after base64 padding", i);
      quad = (quad << 6) | static_cast<std::uint32_t>(v);
      ++filled;
    }
    if (filled == 4) {
      const std::uint8_t b[3] = {std::uint8_t(quad >> 16), std::uint8_t(quad >> 8), std::uint8_t(quad)};
      // Unused bits under the padding must be zero.
      if ((padding == 1 && b[2] != 0) || (padding == 2 && (b[1] != 0 || b[2] != 0)))
        throw ParseError("non-canonical base64 padding bits", i);
      out.insert(out.end(), b, b + 3 - padding);
      if (padding) {
        // Only whitespace may follow.
        for (std::size_t j = i + 1; j < text.size(); ++j)
          if (!is_space(text[j])) throw ParseError("data after base64 padding", j);
        return out;
      }
      quad = 0;
      filled = 0;
    }
  }
  if (filled != 0) throw ParseError("truncated base64 quantum", last + 1);
  return out;
}

}  // namespace swinscan::report
