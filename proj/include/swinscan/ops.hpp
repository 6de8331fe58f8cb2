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
#include <span>
#include <vector>

#include "swinscan/tensor.hpp"

/// Differentiable tensor operations. Each records its backward rule on the
/// active tape (see Tape::Recording) when an input requires grad.
namespace swinscan::ops {

/// [m x k] * [k x n] -> [m x n]
Tensor matmul(const Tensor& a, const Tensor& b);

/// Batched product over the leading extent: [B x m x k] * [B x k x n], or
/// [B x m x k] * [B x n x k]^T when transpose_b is set.
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);

/// x[..., k] * weight[k x n] + bias[n]. `bias` may be undefined.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

/// Elementwise sum. `b` may have the shape of any suffix of `a`'s shape, in
/// which case it is repeated over the leading axes.
Tensor add(const Tensor& a, const Tensor& b);

Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

/// Sum / mean of all elements, as a rank-0 tensor.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Mean over one axis; the axis is removed from the shape.
Tensor mean_axis(const Tensor& a, std::size_t axis);

Tensor reshape(const Tensor& a, Shape shape);

/// out.shape[i] = a.shape[axes[i]].
Tensor permute(const Tensor& a, std::span<const std::size_t> axes);
Tensor permute(const Tensor& a, std::initializer_list<std::size_t> axes);

/// Contiguous range [start, start + length) along one axis.
Tensor narrow(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);

/// Cyclic roll along one axis: out[(i + shift) mod n] = a[i].
Tensor roll(const Tensor& a, std::size_t axis, long shift);

/// Rows of a 2-D table: out[i] = table[indices[i]].
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices);

/// Normalizes over the last axis, then applies gamma * x + beta.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

/// Tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
Tensor gelu(const Tensor& x);

/// Softmax over the last axis with the row maximum subtracted first.
Tensor softmax_lastdim(const Tensor& x);

/// Mean negative log-likelihood of `labels` under softmax(logits).
/// logits: [b x c]; throws LabelError for a label >= c.
Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels);

}  // namespace swinscan::ops
