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

// Central finite-difference oracle for reverse-mode gradients. It evaluates
// the loss function with recording disabled, so it never touches the
// backward rules it is checking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "swinscan/ops.hpp"
#include "swinscan/tensor.hpp"

namespace swinscan::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t coordinates = 0;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps the ratio meaningful for
/// gradients that are zero up to rounding.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

using LossFn = std::function<Tensor(const std::vector<Tensor>&)>;

/// Compares backward() against central differences with step `h`. When
/// `max_coords_per_input` is nonzero, that many coordinates of each input
/// are sampled (with `rng`) instead of checking every element.
inline GradCheckResult grad_check(const LossFn& fn, std::vector<Tensor> inputs,
                                  double h = 1e-5, std::size_t max_coords_per_input = 0,
                                  std::mt19937_64* rng = nullptr) {
  for (auto& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  {
    Tape tape;
    Tape::Recording rec(tape);
    Tensor loss = fn(inputs);
    backward(tape, loss);
  }
  GradCheckResult result;
  for (auto& t : inputs) {
    std::vector<std::size_t> coords(t.numel());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (max_coords_per_input && coords.size() > max_coords_per_input && rng) {
      std::shuffle(coords.begin(), coords.end(), *rng);
      coords.resize(max_coords_per_input);
    }
    std::vector<double> analytic(t.grad().begin(), t.grad().end());
    for (std::size_t i : coords) {
      auto values = t.mutable_data();
      const double saved = values[i];
      values[i] = saved + h;
      const double plus = fn(inputs).item();
      values[i] = saved - h;
      const double minus = fn(inputs).item();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      result.max_rel_error = std::max(result.max_rel_error, relative_error(analytic[i], numeric));
      result.max_abs_error = std::max(result.max_abs_error, std::abs(analytic[i] - numeric));
      ++result.coordinates;
    }
  }
  return result;
}

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = dist(rng);
  return Tensor::from(std::move(shape), std::move(v));
}

/// Fixed pseudo-random weighting that turns any tensor into a scalar loss
/// with non-degenerate gradients: sum(x * w).
inline Tensor weighted_sum(const Tensor& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor w = random_tensor(x.shape(), rng);
  return ops::sum(ops::mul(x, w));
}

}  // namespace swinscan::testing
