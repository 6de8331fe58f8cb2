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

#include "swinscan/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swinscan/error.hpp"
#include "swinscan/simd/kernels.hpp"

namespace swinscan::ops {
namespace {

const simd::Kernels& K() { return simd::active(); }

void accumulate(const Tensor& t, std::span<const double> g) {
  if (!t.requires_grad()) return;
  auto dst = t.mutable_grad();
  K().axpy(g.size(), 1.0, g.data(), dst.data());
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got " + shape_string(t.shape()));
  }
}

// Odometer walk over the output of a permutation. Calls fn(out_offset,
// src_offset) for every element.
template <typename Fn>
void for_each_permuted(const Shape& src_shape, std::span<const std::size_t> axes, Fn fn) {
  const std::size_t rank = src_shape.size();
  std::vector<std::size_t> src_stride(rank, 1);
  for (std::size_t i = rank; i-- > 1;) src_stride[i - 1] = src_stride[i] * src_shape[i];
  Shape out_shape(rank);
  std::vector<std::size_t> stride(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    out_shape[i] = src_shape[axes[i]];
    stride[i] = src_stride[axes[i]];
  }
  const std::size_t total = shape_numel(src_shape);
  if (rank == 0) {
    fn(std::size_t{0}, std::size_t{0});
    return;
  }
  std::vector<std::size_t> idx(rank, 0);
  const std::size_t inner = out_shape[rank - 1];
  const std::size_t inner_stride = stride[rank - 1];
  std::size_t out = 0;
  while (out < total) {
    std::size_t base = 0;
    for (std::size_t i = 0; i + 1 < rank; ++i) base += idx[i] * stride[i];
    for (std::size_t j = 0; j < inner; ++j) fn(out + j, base + j * inner_stride);
    out += inner;
    for (std::size_t i = rank - 1; i-- > 0;) {
      if (++idx[i] < out_shape[i]) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  if (a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: inner extents differ for " + shape_string(a.shape()) +
                         " and " + shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n);
  K().gemm_nn(m, n, k, a.data().data(), b.data().data(), out.data(), false);
  Tensor y = make_result({m, n}, std::move(out), false);
  record_op("matmul", {a, b}, y, [a, b, m, n, k](const Tensor& y) mutable {
    const double* g = y.grad().data();
    if (a.requires_grad()) K().gemm_nt(m, k, n, g, b.data().data(), a.mutable_grad().data(), true);
    if (b.requires_grad()) K().gemm_tn(k, n, m, a.data().data(), g, b.mutable_grad().data(), true);
  });
  return y;
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  require_rank(a, 3, "bmm");
  require_rank(b, 3, "bmm");
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2);
  const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
  const std::size_t bk = transpose_b ? b.dim(2) : b.dim(1);
  if (b.dim(0) != batch || bk != k) {
    throw DimensionError("bmm: incompatible operands " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + (transpose_b ? " (transposed)" : ""));
  }
  std::vector<double> out(batch * m * n);
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  for (std::size_t i = 0; i < batch; ++i) {
    if (transpose_b) {
      K().gemm_nt(m, n, k, ad + i * m * k, bd + i * n * k, out.data() + i * m * n, false);
    } else {
      K().gemm_nn(m, n, k, ad + i * m * k, bd + i * k * n, out.data() + i * m * n, false);
    }
  }
  Tensor y = make_result({batch, m, n}, std::move(out), false);
  record_op("bmm", {a, b}, y, [a, b, batch, m, n, k, transpose_b](const Tensor& y) mutable {
    const double* g = y.grad().data();
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    for (std::size_t i = 0; i < batch; ++i) {
      const double* gi = g + i * m * n;
      if (transpose_b) {
        // y = a b^T: da = g b, db = g^T a
        if (a.requires_grad())
          K().gemm_nn(m, k, n, gi, bd + i * n * k, a.mutable_grad().data() + i * m * k, true);
        if (b.requires_grad())
          K().gemm_tn(n, k, m, gi, ad + i * m * k, b.mutable_grad().data() + i * n * k, true);
      } else {
        if (a.requires_grad())
          K().gemm_nt(m, k, n, gi, bd + i * k * n, a.mutable_grad().data() + i * m * k, true);
        if (b.requires_grad())
          K().gemm_tn(k, n, m, ad + i * m * k, gi, b.mutable_grad().data() + i * k * n, true);
      }
    }
  });
  return y;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(weight, 2, "linear");
  if (x.rank() < 1 || x.shape().back() != weight.dim(0)) {
    throw DimensionError("linear: input " + shape_string(x.shape()) +
                         " does not match weight " + shape_string(weight.shape()));
  }
  const std::size_t k = weight.dim(0), n = weight.dim(1);
  const std::size_t rows = x.numel() / k;
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != n)) {
    throw DimensionError("linear: bias " + shape_string(bias.shape()) +
                         " does not match weight " + shape_string(weight.shape()));
  }
  std::vector<double> out(rows * n);
  K().gemm_nn(rows, n, k, x.data().data(), weight.data().data(), out.data(), false);
  if (bias.defined()) {
    const double* bd = bias.data().data();
    for (std::size_t r = 0; r < rows; ++r) K().add(n, out.data() + r * n, bd, out.data() + r * n);
  }
  Shape shape = x.shape();
  shape.back() = n;
  Tensor y = make_result(std::move(shape), std::move(out), false);
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  record_op("linear", std::move(inputs), y, [x, weight, bias, rows, k, n](const Tensor& y) mutable {
    const double* g = y.grad().data();
    if (x.requires_grad())
      K().gemm_nt(rows, k, n, g, weight.data().data(), x.mutable_grad().data(), true);
    if (weight.requires_grad())
      K().gemm_tn(k, n, rows, x.data().data(), g, weight.mutable_grad().data(), true);
    if (bias.defined() && bias.requires_grad()) {
      double* gb = bias.mutable_grad().data();
      for (std::size_t r = 0; r < rows; ++r) K().axpy(n, 1.0, g + r * n, gb);
    }
  });
  return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (bs.size() > as.size() || !std::equal(bs.begin(), bs.end(), as.end() - bs.size())) {
    throw DimensionError("add: " + shape_string(bs) + " is not a suffix of " + shape_string(as));
  }
  const std::size_t n = b.numel();
  const std::size_t reps = a.numel() / n;
  std::vector<double> out(a.numel());
  for (std::size_t r = 0; r < reps; ++r) {
    K().add(n, a.data().data() + r * n, b.data().data(), out.data() + r * n);
  }
  Tensor y = make_result(as, std::move(out), false);
  record_op("add", {a, b}, y, [a, b, n, reps](const Tensor& y) mutable {
    accumulate(a, y.grad());
    if (b.requires_grad()) {
      double* gb = b.mutable_grad().data();
      for (std::size_t r = 0; r < reps; ++r) K().axpy(n, 1.0, y.grad().data() + r * n, gb);
    }
  });
  return y;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("mul: shapes differ: " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  std::vector<double> out(a.numel());
  K().mul(out.size(), a.data().data(), b.data().data(), out.data());
  Tensor y = make_result(a.shape(), std::move(out), false);
  record_op("mul", {a, b}, y, [a, b](const Tensor& y) mutable {
    const std::size_t n = y.numel();
    std::vector<double> tmp(n);
    if (a.requires_grad()) {
      K().mul(n, y.grad().data(), b.data().data(), tmp.data());
      accumulate(a, tmp);
    }
    if (b.requires_grad()) {
      K().mul(n, y.grad().data(), a.data().data(), tmp.data());
      accumulate(b, tmp);
    }
  });
  return y;
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.numel());
  K().scale(out.size(), factor, a.data().data(), out.data());
  Tensor y = make_result(a.shape(), std::move(out), false);
  record_op("scale", {a}, y, [a, factor](const Tensor& y) mutable {
    if (a.requires_grad()) K().axpy(y.numel(), factor, y.grad().data(), a.mutable_grad().data());
  });
  return y;
}

Tensor sum(const Tensor& a) {
  Tensor y = make_result({}, {K().sum(a.numel(), a.data().data())}, false);
  record_op("sum", {a}, y, [a](const Tensor& y) mutable {
    if (!a.requires_grad()) return;
    const double g = y.grad()[0];
    for (double& v : a.mutable_grad()) v += g;
  });
  return y;
}

Tensor mean(const Tensor& a) {
  const double n = static_cast<double>(a.numel());
  Tensor y = make_result({}, {K().sum(a.numel(), a.data().data()) / n}, false);
  record_op("mean", {a}, y, [a, n](const Tensor& y) mutable {
    if (!a.requires_grad()) return;
    const double g = y.grad()[0] / n;
    for (double& v : a.mutable_grad()) v += g;
  });
  return y;
}

Tensor mean_axis(const Tensor& a, std::size_t axis) {
  if (axis >= a.rank()) {
    throw DimensionError("mean_axis: axis " + std::to_string(axis) + " out of range for " +
                         shape_string(a.shape()));
  }
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t d = s[axis];
  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != axis) out_shape.push_back(s[i]);
  std::vector<double> out(outer * inner, 0.0);
  const double* ad = a.data().data();
  for (std::size_t o = 0; o < outer; ++o) {
    double* dst = out.data() + o * inner;
    for (std::size_t j = 0; j < d; ++j) K().axpy(inner, 1.0, ad + (o * d + j) * inner, dst);
    K().scale(inner, 1.0 / static_cast<double>(d), dst, dst);
  }
  Tensor y = make_result(std::move(out_shape), std::move(out), false);
  record_op("mean_axis", {a}, y, [a, outer, inner, d](const Tensor& y) mutable {
    if (!a.requires_grad()) return;
    double* ga = a.mutable_grad().data();
    const double* g = y.grad().data();
    const double w = 1.0 / static_cast<double>(d);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t j = 0; j < d; ++j) K().axpy(inner, w, g + o * inner, ga + (o * d + j) * inner);
  });
  return y;
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + shape_string(a.shape()) + " as " +
                         shape_string(shape));
  }
  Tensor y = make_result(std::move(shape), std::vector<double>(a.data().begin(), a.data().end()),
                         false);
  record_op("reshape", {a}, y, [a](const Tensor& y) mutable { accumulate(a, y.grad()); });
  return y;
}

Tensor permute(const Tensor& a, std::span<const std::size_t> axes) {
  const std::size_t rank = a.rank();
  std::vector<bool> seen(rank, false);
  if (axes.size() != rank) {
    throw DimensionError("permute: " + std::to_string(axes.size()) + " axes for " +
                         shape_string(a.shape()));
  }
  for (std::size_t ax : axes) {
    if (ax >= rank || seen[ax]) throw DimensionError("permute: axes are not a permutation");
    seen[ax] = true;
  }
  Shape out_shape(rank);
  for (std::size_t i = 0; i < rank; ++i) out_shape[i] = a.dim(axes[i]);
  std::vector<double> out(a.numel());
  const double* src = a.data().data();
  for_each_permuted(a.shape(), axes, [&](std::size_t o, std::size_t s) { out[o] = src[s]; });
  Tensor y = make_result(std::move(out_shape), std::move(out), false);
  std::vector<std::size_t> ax(axes.begin(), axes.end());
  record_op("permute", {a}, y, [a, ax](const Tensor& y) mutable {
    if (!a.requires_grad()) return;
    double* ga = a.mutable_grad().data();
    const double* g = y.grad().data();
    for_each_permuted(a.shape(), ax, [&](std::size_t o, std::size_t s) { ga[s] += g[o]; });
  });
  return y;
}

Tensor permute(const Tensor& a, std::initializer_list<std::size_t> axes) {
  return permute(a, std::span<const std::size_t>(axes.begin(), axes.size()));
}

Tensor narrow(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  if (axis >= a.rank() || length == 0 || start + length > a.dim(axis)) {
    throw DimensionError("narrow: range [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") on axis " + std::to_string(axis) +
                         " is invalid for " + shape_string(a.shape()));
  }
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t n = s[axis];
  Shape out_shape = s;
  out_shape[axis] = length;
  std::vector<double> out(outer * length * inner);
  const double* src = a.data().data();
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(src + (o * n + start) * inner, length * inner, out.data() + o * length * inner);
  Tensor y = make_result(std::move(out_shape), std::move(out), false);
  record_op("narrow", {a}, y, [a, outer, inner, n, start, length](const Tensor& y) mutable {
    if (!a.requires_grad()) return;
    double* ga = a.mutable_grad().data();
    const double* g = y.grad().data();
    for (std::size_t o = 0; o < outer; ++o)
      K().axpy(length * inner, 1.0, g + o * length * inner, ga + (o * n + start) * inner);
  });
  return y;
}

Tensor roll(const Tensor& a, std::size_t axis, long shift) {
  if (axis >= a.rank()) {
    throw DimensionError("roll: axis " + std::to_string(axis) + " out of range for " +
                         shape_string(a.shape()));
  }
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t n = s[axis];
  const long nl = static_cast<long>(n);
  const std::size_t sh = static_cast<std::size_t>(((shift % nl) + nl) % nl);
  std::vector<double> out(a.numel());
  const double* src = a.data().data();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(src + (o * n + i) * inner, inner, out.data() + (o * n + (i + sh) % n) * inner);
  Tensor y = make_result(s, std::move(out), false);
  record_op("roll", {a}, y, [a, outer, inner, n, sh](const Tensor& y) mutable {
    if (!a.requires_grad()) return;
    double* ga = a.mutable_grad().data();
    const double* g = y.grad().data();
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < n; ++i)
        K().axpy(inner, 1.0, g + (o * n + (i + sh) % n) * inner, ga + (o * n + i) * inner);
  });
  return y;
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  require_rank(table, 2, "gather_rows");
  const std::size_t rows = table.dim(0), cols = table.dim(1);
  std::vector<double> out(indices.size() * cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows) {
      throw DimensionError("gather_rows: index " + std::to_string(indices[i]) +
                           " out of range for " + shape_string(table.shape()));
    }
    std::copy_n(table.data().data() + indices[i] * cols, cols, out.data() + i * cols);
  }
  Tensor y = make_result({indices.size(), cols}, std::move(out), false);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  record_op("gather_rows", {table}, y, [table, idx, cols](const Tensor& y) mutable {
    if (!table.requires_grad()) return;
    double* gt = table.mutable_grad().data();
    const double* g = y.grad().data();
    for (std::size_t i = 0; i < idx.size(); ++i) K().axpy(cols, 1.0, g + i * cols, gt + idx[i] * cols);
  });
  return y;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (eps <= 0.0) throw ConfigError("layer_norm: eps must be positive");
  if (x.rank() < 1) throw DimensionError("layer_norm: scalar input");
  const std::size_t c = x.shape().back();
  if (gamma.numel() != c || beta.numel() != c) {
    throw DimensionError("layer_norm: gamma " + shape_string(gamma.shape()) + " / beta " +
                         shape_string(beta.shape()) + " do not match input " +
                         shape_string(x.shape()));
  }
  const std::size_t rows = x.numel() / c;
  std::vector<double> xhat(x.numel());
  std::vector<double> rstd(rows);
  std::vector<double> out(x.numel());
  const double* xd = x.data().data();
  const double* gd = gamma.data().data();
  const double* bd = beta.data().data();
  const double inv_c = 1.0 / static_cast<double>(c);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xd + r * c;
    double* xh = xhat.data() + r * c;
    const double mu = K().sum(c, row) * inv_c;
    for (std::size_t j = 0; j < c; ++j) xh[j] = row[j] - mu;
    const double var = K().dot(c, xh, xh) * inv_c;
    rstd[r] = 1.0 / std::sqrt(var + eps);
    K().scale(c, rstd[r], xh, xh);
    double* o = out.data() + r * c;
    K().mul(c, xh, gd, o);
    K().add(c, o, bd, o);
  }
  Tensor y = make_result(x.shape(), std::move(out), false);
  record_op("layer_norm", {x, gamma, beta}, y,
            [x, gamma, beta, xhat = std::move(xhat), rstd = std::move(rstd), rows, c,
             inv_c](const Tensor& y) mutable {
              const double* g = y.grad().data();
              const double* gd = gamma.data().data();
              std::vector<double> dxh(c);
              for (std::size_t r = 0; r < rows; ++r) {
                const double* gr = g + r * c;
                const double* xh = xhat.data() + r * c;
                if (gamma.requires_grad()) {
                  double* gg = gamma.mutable_grad().data();
                  for (std::size_t j = 0; j < c; ++j) gg[j] += gr[j] * xh[j];
                }
                if (beta.requires_grad()) K().axpy(c, 1.0, gr, beta.mutable_grad().data());
                if (x.requires_grad()) {
                  K().mul(c, gr, gd, dxh.data());
                  const double m1 = K().sum(c, dxh.data()) * inv_c;
                  const double m2 = K().dot(c, dxh.data(), xh) * inv_c;
                  double* gx = x.mutable_grad().data() + r * c;
                  for (std::size_t j = 0; j < c; ++j) gx[j] += rstd[r] * (dxh[j] - m1 - xh[j] * m2);
                }
              }
            });
  return y;
}

Tensor gelu(const Tensor& x) {
  constexpr double kAlpha = 0.044715;
  const double k = std::sqrt(2.0 / std::numbers::pi);
  std::vector<double> out(x.numel());
  const double* xd = x.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xd[i];
    out[i] = 0.5 * v * (1.0 + std::tanh(k * (v + kAlpha * v * v * v)));
  }
  Tensor y = make_result(x.shape(), std::move(out), false);
  record_op("gelu", {x}, y, [x, k](const Tensor& y) mutable {
    if (!x.requires_grad()) return;
    const double* xd = x.data().data();
    const double* g = y.grad().data();
    double* gx = x.mutable_grad().data();
    for (std::size_t i = 0; i < y.numel(); ++i) {
      const double v = xd[i];
      const double t = std::tanh(k * (v + kAlpha * v * v * v));
      const double dt = (1.0 - t * t) * k * (1.0 + 3.0 * kAlpha * v * v);
      gx[i] += g[i] * (0.5 * (1.0 + t) + 0.5 * v * dt);
    }
  });
  return y;
}

Tensor softmax_lastdim(const Tensor& x) {
  if (!x.defined() || x.numel() == 0 || x.rank() == 0) {
    throw InputError("softmax_lastdim: empty input");
  }
  const std::size_t c = x.shape().back();
  const std::size_t rows = x.numel() / c;
  std::vector<double> out(x.numel());
  const double* xd = x.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xd + r * c;
    double* o = out.data() + r * c;
    const double mx = *std::max_element(row, row + c);
    for (std::size_t j = 0; j < c; ++j) o[j] = std::exp(row[j] - mx);
    const double z = K().sum(c, o);
    K().scale(c, 1.0 / z, o, o);
  }
  Tensor y = make_result(x.shape(), std::move(out), false);
  record_op("softmax", {x}, y, [x, rows, c](const Tensor& y) mutable {
    if (!x.requires_grad()) return;
    const double* yd = y.data().data();
    const double* g = y.grad().data();
    double* gx = x.mutable_grad().data();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* yr = yd + r * c;
      const double* gr = g + r * c;
      const double s = K().dot(c, gr, yr);
      for (std::size_t j = 0; j < c; ++j) gx[r * c + j] += yr[j] * (gr[j] - s);
    }
  });
  return y;
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels) {
  require_rank(logits, 2, "cross_entropy");
  const std::size_t b = logits.dim(0), c = logits.dim(1);
  if (labels.size() != b) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         shape_string(logits.shape()));
  }
  std::vector<double> probs(b * c);
  double total = 0.0;
  const double* ld = logits.data().data();
  for (std::size_t r = 0; r < b; ++r) {
    if (labels[r] >= c) {
      throw LabelError("cross_entropy: label " + std::to_string(labels[r]) + " at index " +
                           std::to_string(r) + " is not below " + std::to_string(c),
                       r);
    }
    const double* row = ld + r * c;
    double* p = probs.data() + r * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      p[j] = std::exp(row[j] - mx);
      z += p[j];
    }
    for (std::size_t j = 0; j < c; ++j) p[j] /= z;
    total += -(row[labels[r]] - mx - std::log(z));
  }
  Tensor y = make_result({}, {total / static_cast<double>(b)}, false);
  std::vector<std::size_t> lab(labels.begin(), labels.end());
  record_op("cross_entropy", {logits}, y,
            [logits, probs = std::move(probs), lab, b, c](const Tensor& y) mutable {
              if (!logits.requires_grad()) return;
              const double g = y.grad()[0] / static_cast<double>(b);
              double* gl = logits.mutable_grad().data();
              for (std::size_t r = 0; r < b; ++r) {
                for (std::size_t j = 0; j < c; ++j) {
                  const double target = j == lab[r] ? 1.0 : 0.0;
                  gl[r * c + j] += g * (probs[r * c + j] - target);
                }
              }
            });
  return y;
}

}  // namespace swinscan::ops
