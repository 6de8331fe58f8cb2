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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "swinscan/swin.hpp"

/// Binary weight file:
///
///   "SWNW"  u32 version
///   config: u32 image_size, in_channels, patch_size, embed_dim, num_stages,
///           u32 depths[num_stages], u32 num_heads[num_stages],
///           u32 window_size, shift_size, f64 mlp_ratio, u32 num_classes
///   u32 parameter count, then per parameter:
///           u32 path length, path bytes, u32 rank, u64 extents[rank],
///           f64 values[product(extents)]
///
/// All integers and floats are little-endian; floats are raw IEEE-754
/// binary64, so a save/load round trip is bit-exact.
namespace swinscan::swin {

inline constexpr std::uint32_t kWeightFormatVersion = 1;

std::vector<std::uint8_t> serialize_weights(const ModelWeights& weights);

/// Throws FormatError (with byte offset) on bad magic, unknown version or
/// truncation, and ConfigError when `expected` is given and differs from
/// the stored config or the parameters do not match it.
ModelWeights deserialize_weights(std::span<const std::uint8_t> bytes,
                                 const std::optional<SwinConfig>& expected = std::nullopt);

void save_weights(const ModelWeights& weights, const std::filesystem::path& path);
ModelWeights load_weights(const std::filesystem::path& path,
                          const std::optional<SwinConfig>& expected = std::nullopt);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace swinscan::swin
