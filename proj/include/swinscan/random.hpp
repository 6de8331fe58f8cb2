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
#include <random>
#include <span>
#include <utility>

// Portable draws on top of mt19937_64. The standard distributions are
// implementation-defined, so shuffles and coin flips that must reproduce
// across toolchains go through these instead.
namespace swinscan::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for item `index` under `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

/// Uniform integer in [0, n) by rejection; n must be nonzero.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - n) % n;  // largest multiple of n, mod 2^64
  for (;;) {
    const std::uint64_t x = g();
    if (limit == 0 || x < limit) return x % n;
  }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle(std::span<T> items, std::mt19937_64& g) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_below(g, i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace swinscan::rng
