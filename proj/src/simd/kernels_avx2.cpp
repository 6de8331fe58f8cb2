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

// Compiled with -mavx2 and without FMA contraction so that every kernel
// except the reductions reproduces the scalar results bit for bit.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "swinscan/simd/kernels.hpp"

namespace swinscan::simd {
namespace {

constexpr std::size_t kLanes = 4;

// Register tile: 4 rows by 8 columns, accumulated over the full depth in
// ascending order of the inner index.
template <typename AIndex>
void gemm_rowmajor_b(std::size_t m, std::size_t n, std::size_t k, AIndex a_at,
                     const double* b, double* c, bool accumulate) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d acc[4][2];
      for (int r = 0; r < 4; ++r) {
        if (accumulate) {
          acc[r][0] = _mm256_loadu_pd(c + (i + r) * n + j);
          acc[r][1] = _mm256_loadu_pd(c + (i + r) * n + j + 4);
        } else {
          acc[r][0] = _mm256_setzero_pd();
          acc[r][1] = _mm256_setzero_pd();
        }
      }
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d b0 = _mm256_loadu_pd(b + p * n + j);
        const __m256d b1 = _mm256_loadu_pd(b + p * n + j + 4);
        for (int r = 0; r < 4; ++r) {
          const __m256d av = _mm256_set1_pd(a_at(i + r, p));
          acc[r][0] = _mm256_add_pd(acc[r][0], _mm256_mul_pd(av, b0));
          acc[r][1] = _mm256_add_pd(acc[r][1], _mm256_mul_pd(av, b1));
        }
      }
      for (int r = 0; r < 4; ++r) {
        _mm256_storeu_pd(c + (i + r) * n + j, acc[r][0]);
        _mm256_storeu_pd(c + (i + r) * n + j + 4, acc[r][1]);
      }
    }
    for (; j + kLanes <= n; j += kLanes) {
      __m256d acc[4];
      for (int r = 0; r < 4; ++r) {
        acc[r] = accumulate ? _mm256_loadu_pd(c + (i + r) * n + j)
                            : _mm256_setzero_pd();
      }
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d bv = _mm256_loadu_pd(b + p * n + j);
        for (int r = 0; r < 4; ++r) {
          acc[r] = _mm256_add_pd(acc[r],
                                 _mm256_mul_pd(_mm256_set1_pd(a_at(i + r, p)), bv));
        }
      }
      for (int r = 0; r < 4; ++r) _mm256_storeu_pd(c + (i + r) * n + j, acc[r]);
    }
    for (; j < n; ++j) {
      for (int r = 0; r < 4; ++r) {
        double s = accumulate ? c[(i + r) * n + j] : 0.0;
        for (std::size_t p = 0; p < k; ++p) s += a_at(i + r, p) * b[p * n + j];
        c[(i + r) * n + j] = s;
      }
    }
  }
  for (; i < m; ++i) {
    double* crow = c + i * n;
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
      __m256d acc = accumulate ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(a_at(i, p)),
                                               _mm256_loadu_pd(b + p * n + j)));
      }
      _mm256_storeu_pd(crow + j, acc);
    }
    for (; j < n; ++j) {
      double s = accumulate ? crow[j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a_at(i, p) * b[p * n + j];
      crow[j] = s;
    }
  }
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  gemm_rowmajor_b(
      m, n, k, [a, k](std::size_t i, std::size_t p) { return a[i * k + p]; }, b,
      c, accumulate);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  gemm_rowmajor_b(
      m, n, k, [a, m](std::size_t i, std::size_t p) { return a[p * m + i]; }, b,
      c, accumulate);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  thread_local std::vector<double> bt;
  bt.resize(k * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * k + p];
  }
  gemm_nn(m, n, k, a, bt.data(), c, accumulate);
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                    _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void mul(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void scale(std::size_t n, double alpha, const double* x, double* out) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) out[i] = alpha * x[i];
}

double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                             _mm256_loadu_pd(y + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4),
                                             _mm256_loadu_pd(y + i + 4)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum(std::size_t n, const double* x) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

void adamw(std::size_t n, const AdamWStep& st, double* param,
           const double* grad, double* m, double* v) {
  const double decay_s = 1.0 - st.lr * st.weight_decay;
  const double omb1_s = 1.0 - st.beta1;
  const double omb2_s = 1.0 - st.beta2;
  const __m256d decay = _mm256_set1_pd(decay_s);
  const __m256d b1 = _mm256_set1_pd(st.beta1);
  const __m256d b2 = _mm256_set1_pd(st.beta2);
  const __m256d omb1 = _mm256_set1_pd(omb1_s);
  const __m256d omb2 = _mm256_set1_pd(omb2_s);
  const __m256d bc1 = _mm256_set1_pd(st.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(st.bias_correction2);
  const __m256d eps = _mm256_set1_pd(st.eps);
  const __m256d lr = _mm256_set1_pd(st.lr);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    __m256d p = _mm256_mul_pd(_mm256_loadu_pd(param + i), decay);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(omb1, g));
    const __m256d vi =
        _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                      _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    const __m256d mhat = _mm256_div_pd(mi, bc1);
    const __m256d vhat = _mm256_div_pd(vi, bc2);
    const __m256d upd =
        _mm256_div_pd(mhat, _mm256_add_pd(_mm256_sqrt_pd(vhat), eps));
    p = _mm256_sub_pd(p, _mm256_mul_pd(lr, upd));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    _mm256_storeu_pd(param + i, p);
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    double p = param[i] * decay_s;
    const double mi = st.beta1 * m[i] + omb1_s * g;
    const double vi = st.beta2 * v[i] + omb2_s * (g * g);
    const double mhat = mi / st.bias_correction1;
    const double vhat = vi / st.bias_correction2;
    p = p - st.lr * (mhat / (std::sqrt(vhat) + st.eps));
    m[i] = mi;
    v[i] = vi;
    param[i] = p;
  }
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{"avx2", gemm_nn, gemm_nt, gemm_tn, axpy, add,
                         mul,    scale,   dot,     sum,     adamw};
  return &k;
}

}  // namespace swinscan::simd
