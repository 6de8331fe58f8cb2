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

#include <atomic>
#include <cstdlib>
#include <string>

#include "swinscan/error.hpp"
#include "swinscan/simd/kernels.hpp"

namespace swinscan::simd {
namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("SWINSCAN_SIMD")) {
    if (auto b = parse_backend(env); b && backend_available(*b)) return *b;
  }
  return backend_available(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return avx2_kernels() != nullptr && cpu_supports_avx2();
  }
  return false;
}

const Kernels& active() {
  if (current().load(std::memory_order_relaxed) == Backend::kAvx2) {
    return *avx2_kernels();
  }
  return scalar_kernels();
}

Backend backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw ConfigError("SIMD backend '" + std::string(backend_name(b)) +
                      "' is not available on this CPU");
  }
  current().store(b, std::memory_order_relaxed);
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  return std::nullopt;
}

std::string_view backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

}  // namespace swinscan::simd
