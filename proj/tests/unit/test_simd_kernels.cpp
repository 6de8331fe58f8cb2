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
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "swinscan/error.hpp"
#include "swinscan/simd/kernels.hpp"

using namespace swinscan::simd;

namespace {

std::vector<double> rand_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Shapes chosen to hit full 4x8 tiles, 4-wide tails, and scalar tails.
const std::size_t kDims[] = {1, 2, 3, 4, 5, 7, 8, 9, 13, 16, 17, 33};

}  // namespace

TEST_CASE("scalar gemm_nn matches a naive triple loop") {
  std::mt19937_64 rng(1);
  const auto& k = scalar_kernels();
  for (std::size_t m : {1, 3, 5}) {
    for (std::size_t n : {1, 4, 6}) {
      for (std::size_t kk : {1, 2, 7}) {
        auto a = rand_vec(m * kk, rng), b = rand_vec(kk * n, rng);
        std::vector<double> c(m * n);
        k.gemm_nn(m, n, kk, a.data(), b.data(), c.data(), false);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t p = 0; p < kk; ++p) s += a[i * kk + p] * b[p * n + j];
            CHECK(std::abs(c[i * n + j] - s) <= 1e-12);
          }
      }
    }
  }
}

TEST_CASE("transposed gemm variants agree with gemm_nn on explicit transposes") {
  std::mt19937_64 rng(2);
  const auto& k = scalar_kernels();
  const std::size_t m = 5, n = 6, kk = 7;
  auto a = rand_vec(m * kk, rng), b = rand_vec(kk * n, rng);
  std::vector<double> at(kk * m), bt(n * kk);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < kk; ++p) at[p * m + i] = a[i * kk + p];
  for (std::size_t p = 0; p < kk; ++p)
    for (std::size_t j = 0; j < n; ++j) bt[j * kk + p] = b[p * n + j];
  std::vector<double> ref(m * n), nt(m * n), tn(m * n);
  k.gemm_nn(m, n, kk, a.data(), b.data(), ref.data(), false);
  k.gemm_nt(m, n, kk, a.data(), bt.data(), nt.data(), false);
  k.gemm_tn(m, n, kk, at.data(), b.data(), tn.data(), false);
  CHECK(bitwise_equal(ref, nt));
  CHECK(bitwise_equal(ref, tn));
}

TEST_CASE("avx2 kernels reproduce scalar kernels") {
  if (!backend_available(Backend::kAvx2)) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  const auto& s = scalar_kernels();
  const auto& v = *avx2_kernels();
  std::mt19937_64 rng(3);

  SUBCASE("gemm variants are bit-identical, overwrite and accumulate") {
    for (std::size_t m : kDims) {
      for (std::size_t n : kDims) {
        for (std::size_t kk : {1, 3, 8, 17}) {
          auto a = rand_vec(m * kk, rng), b = rand_vec(kk * n, rng), c0 = rand_vec(m * n, rng);
          for (bool acc : {false, true}) {
            auto cs = c0, cv = c0;
            s.gemm_nn(m, n, kk, a.data(), b.data(), cs.data(), acc);
            v.gemm_nn(m, n, kk, a.data(), b.data(), cv.data(), acc);
            CHECK(bitwise_equal(cs, cv));
            cs = c0, cv = c0;
            s.gemm_nt(m, n, kk, a.data(), b.data(), cs.data(), acc);
            v.gemm_nt(m, n, kk, a.data(), b.data(), cv.data(), acc);
            CHECK(bitwise_equal(cs, cv));
            cs = c0, cv = c0;
            s.gemm_tn(m, n, kk, a.data(), b.data(), cs.data(), acc);
            v.gemm_tn(m, n, kk, a.data(), b.data(), cv.data(), acc);
            CHECK(bitwise_equal(cs, cv));
          }
        }
      }
    }
  }

  SUBCASE("elementwise kernels are bit-identical") {
    for (std::size_t n : kDims) {
      auto x = rand_vec(n, rng), y = rand_vec(n, rng);
      std::vector<double> os(n), ov(n);
      s.add(n, x.data(), y.data(), os.data());
      v.add(n, x.data(), y.data(), ov.data());
      CHECK(bitwise_equal(os, ov));
      s.mul(n, x.data(), y.data(), os.data());
      v.mul(n, x.data(), y.data(), ov.data());
      CHECK(bitwise_equal(os, ov));
      s.scale(n, 0.37, x.data(), os.data());
      v.scale(n, 0.37, x.data(), ov.data());
      CHECK(bitwise_equal(os, ov));
      auto ys = y, yv = y;
      s.axpy(n, -1.3, x.data(), ys.data());
      v.axpy(n, -1.3, x.data(), yv.data());
      CHECK(bitwise_equal(ys, yv));
    }
  }

  SUBCASE("adamw update is bit-identical") {
    AdamWStep st{3e-4, 0.9, 0.999, 1e-8, 0.01, 1.0 - 0.9 * 0.9, 1.0 - 0.999 * 0.999};
    for (std::size_t n : kDims) {
      auto p = rand_vec(n, rng), g = rand_vec(n, rng), m = rand_vec(n, rng), q = rand_vec(n, rng);
      for (auto& x : q) x = std::abs(x);
      auto ps = p, ms = m, qs = q, pv = p, mv = m, qv = q;
      s.adamw(n, st, ps.data(), g.data(), ms.data(), qs.data());
      v.adamw(n, st, pv.data(), g.data(), mv.data(), qv.data());
      CHECK(bitwise_equal(ps, pv));
      CHECK(bitwise_equal(ms, mv));
      CHECK(bitwise_equal(qs, qv));
    }
  }

  SUBCASE("reductions agree to rounding") {
    for (std::size_t n : {1, 5, 8, 31, 64, 1000}) {
      auto x = rand_vec(n, rng), y = rand_vec(n, rng);
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
      CHECK(std::abs(s.dot(n, x.data(), y.data()) - v.dot(n, x.data(), y.data())) <= 1e-13 * mag + 1e-300);
      double smag = 0;
      for (double e : x) smag += std::abs(e);
      CHECK(std::abs(s.sum(n, x.data()) - v.sum(n, x.data())) <= 1e-13 * smag + 1e-300);
    }
  }
}

TEST_CASE("backend selection") {
  CHECK(parse_backend("scalar") == Backend::kScalar);
  CHECK(parse_backend("avx2") == Backend::kAvx2);
  CHECK_FALSE(parse_backend("neon").has_value());
  {
    ScopedBackend guard(Backend::kScalar);
    CHECK(backend() == Backend::kScalar);
    CHECK(std::string(active().name) == "scalar");
  }
  if (!backend_available(Backend::kAvx2)) {
    CHECK_THROWS_AS(set_backend(Backend::kAvx2), swinscan::ConfigError);
  }
}
