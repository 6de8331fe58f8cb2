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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swinscan::report {

/// Standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Strict decoder: standard alphabet, length a multiple of four, padding
/// only at the end, zero trailing bits. ASCII whitespace is skipped.
/// Throws ParseError with the offending character offset.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace swinscan::report
