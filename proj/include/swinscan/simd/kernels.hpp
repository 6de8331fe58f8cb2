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

#include <cstddef>
#include <optional>
#include <string_view>

namespace swinscan::simd {

enum class Backend { kScalar, kAvx2 };

/// Hyperparameters of one decoupled-weight-decay Adam step. The bias
/// corrections are precomputed by the caller: 1 - beta^t.
struct AdamWStep {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double weight_decay;
  double bias_correction1;
  double bias_correction2;
};

/// Function table for the arithmetic inner loops. Every backend computes
/// each output element with the same sequence of IEEE operations, except
/// for `dot` and `sum`, whose vector variants reassociate the reduction.
/// Matrices are dense row-major. With `accumulate` false the output is
/// overwritten, otherwise the products are added onto it.
struct Kernels {
  const char* name;

  /// C[m x n] (+)= A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, bool accumulate);
  /// C[m x n] (+)= A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, bool accumulate);
  /// C[m x n] (+)= A[k x m]^T * B[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, bool accumulate);

  /// y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  /// out = x + y
  void (*add)(std::size_t n, const double* x, const double* y, double* out);
  /// out = x * y
  void (*mul)(std::size_t n, const double* x, const double* y, double* out);
  /// out = alpha * x
  void (*scale)(std::size_t n, double alpha, const double* x, double* out);

  double (*dot)(std::size_t n, const double* x, const double* y);
  double (*sum)(std::size_t n, const double* x);

  void (*adamw)(std::size_t n, const AdamWStep& step, double* param,
                const double* grad, double* m, double* v);
};

const Kernels& scalar_kernels();

/// Null when the build has no AVX2 translation unit.
const Kernels* avx2_kernels();

bool cpu_supports_avx2();

/// Kernels of the currently selected backend. The initial choice is the
/// best one the CPU supports, overridable with SWINSCAN_SIMD=scalar|avx2.
const Kernels& active();

Backend backend();

/// Throws ConfigError if the backend is not available on this CPU/build.
void set_backend(Backend b);

bool backend_available(Backend b);

std::optional<Backend> parse_backend(std::string_view name);

std::string_view backend_name(Backend b);

/// Restores the previous backend on scope exit.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : saved_(backend()) { set_backend(b); }
  ~ScopedBackend() { set_backend(saved_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend saved_;
};

}  // namespace swinscan::simd
