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

#include "swinscan/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "swinscan/error.hpp"

namespace swinscan::swin {
namespace {

constexpr char kMagic[4] = {'S', 'W', 'N', 'W'};

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const void* p, std::size_t n) {
    auto b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get(4, what)); }
  std::uint64_t u64(const char* what) { return get(8, what); }
  double f64(const char* what) { return std::bit_cast<double>(get(8, what)); }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (b_.size() - pos_ < n) {
      throw FormatError(std::string("weight file truncated while reading ") + what, pos_);
    }
  }
  std::uint64_t get(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{b_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_weights(const ModelWeights& weights) {
  const SwinConfig& c = weights.config();
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kWeightFormatVersion);
  w.u32(static_cast<std::uint32_t>(c.image_size));
  w.u32(static_cast<std::uint32_t>(c.in_channels));
  w.u32(static_cast<std::uint32_t>(c.patch_size));
  w.u32(static_cast<std::uint32_t>(c.embed_dim));
  w.u32(static_cast<std::uint32_t>(c.num_stages()));
  for (auto d : c.depths) w.u32(static_cast<std::uint32_t>(d));
  for (auto h : c.num_heads) w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(c.window_size));
  w.u32(static_cast<std::uint32_t>(c.shift_size));
  w.f64(c.mlp_ratio);
  w.u32(static_cast<std::uint32_t>(c.num_classes));
  w.u32(static_cast<std::uint32_t>(weights.params().size()));
  for (const auto& [name, t] : weights.params()) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) w.u64(e);
    for (double v : t.data()) w.f64(v);
  }
  return w.take();
}

ModelWeights deserialize_weights(std::span<const std::uint8_t> bytes,
                                 const std::optional<SwinConfig>& expected) {
  Reader r(bytes);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("bad weight file magic", 0);
  const std::size_t version_at = r.pos();
  if (const auto v = r.u32("version"); v != kWeightFormatVersion) {
    throw FormatError("unsupported weight file version " + std::to_string(v), version_at);
  }
  SwinConfig c;
  c.image_size = r.u32("image_size");
  c.in_channels = r.u32("in_channels");
  c.patch_size = r.u32("patch_size");
  c.embed_dim = r.u32("embed_dim");
  const std::size_t stages_at = r.pos();
  const std::uint32_t stages = r.u32("num_stages");
  if (stages == 0 || stages > 8) throw FormatError("implausible stage count", stages_at);
  c.depths.resize(stages);
  c.num_heads.resize(stages);
  for (auto& d : c.depths) d = r.u32("depths");
  for (auto& h : c.num_heads) h = r.u32("num_heads");
  c.window_size = r.u32("window_size");
  c.shift_size = r.u32("shift_size");
  c.mlp_ratio = r.f64("mlp_ratio");
  c.num_classes = r.u32("num_classes");
  if (expected && !(*expected == c)) {
    throw ConfigError("weight file config does not match the expected model config");
  }
  const std::uint32_t count = r.u32("parameter count");
  std::map<std::string, Tensor> params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t rec_at = r.pos();
    const std::uint32_t len = r.u32("path length");
    auto name_bytes = r.take(len, "path");
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::uint32_t rank = r.u32("rank");
    if (rank > 8) throw FormatError("implausible rank for '" + name + "'", rec_at);
    Shape shape(rank);
    std::size_t n = 1;
    for (auto& e : shape) {
      e = static_cast<std::size_t>(r.u64("extent"));
      if (e == 0 || e > (std::size_t{1} << 32)) throw FormatError("bad extent for '" + name + "'", rec_at);
      n *= e;
    }
    if (n > r.remaining() / 8) {
      throw FormatError("weight file truncated in values of '" + name + "'", r.pos());
    }
    std::vector<double> values(n);
    for (auto& v : values) v = r.f64("values");
    if (!params.emplace(name, Tensor::from(std::move(shape), std::move(values))).second) {
      throw FormatError("duplicate parameter '" + name + "'", rec_at);
    }
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last parameter", r.pos());
  return ModelWeights(std::move(c), std::move(params));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(weights);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

ModelWeights load_weights(const std::filesystem::path& path,
                          const std::optional<SwinConfig>& expected) {
  const auto bytes = read_file_bytes(path);
  return deserialize_weights(bytes, expected);
}

}  // namespace swinscan::swin
