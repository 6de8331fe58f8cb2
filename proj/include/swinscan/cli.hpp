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

#include <chrono>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace swinscan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Operator command line. `args` excludes the program name. Exit codes:
/// 0 success, 1 usage error (usage text on `err`), 2 data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "YYYY-MM-DDTHH:MM:SSZ". Throws InputError.
std::chrono::system_clock::time_point parse_timestamp(std::string_view text);

}  // namespace swinscan::cli
