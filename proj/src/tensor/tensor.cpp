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

#include "swinscan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "swinscan/error.hpp"

namespace swinscan {
namespace detail {

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
};

}  // namespace detail

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

std::shared_ptr<detail::TensorImpl> make_impl(Shape shape,
                                              std::vector<double> values,
                                              bool requires_grad) {
  for (std::size_t e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive: " + shape_string(shape));
  }
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("shape " + shape_string(shape) + " needs " +
                         std::to_string(shape_numel(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(values);
  impl->requires_grad = requires_grad;
  if (requires_grad) impl->grad.assign(impl->data.size(), 0.0);
  return impl;
}

thread_local Tape* g_active_tape = nullptr;

}  // namespace

Tensor::Tensor() = default;
Tensor::Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(make_impl(std::move(shape), std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  return Tensor(make_impl(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(make_impl({}, {value}, requires_grad));
}

const Shape& Tensor::shape() const { return impl_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= impl_->shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " +
                         shape_string(impl_->shape));
  }
  return impl_->shape[axis];
}

std::size_t Tensor::numel() const { return impl_ ? impl_->data.size() : 0; }

std::span<const double> Tensor::data() const { return impl_->data; }
std::span<double> Tensor::mutable_data() { return impl_->data; }

double Tensor::item() const {
  if (impl_->data.size() != 1) {
    throw ContractError("item() needs a single-element tensor, got " +
                        shape_string(impl_->shape));
  }
  return impl_->data[0];
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

void Tensor::set_requires_grad(bool on) {
  impl_->requires_grad = on;
  if (on && impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
}

std::span<const double> Tensor::grad() const { return impl_->grad; }

std::span<double> Tensor::mutable_grad() const {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad;
}

bool Tensor::has_grad() const { return !impl_->grad.empty(); }

void Tensor::zero_grad() const {
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::clone() const { return Tensor(make_impl(impl_->shape, impl_->data, false)); }

Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError("operation produced a non-finite value in tensor of shape " +
                         shape_string(shape));
    }
  }
  return Tensor(make_impl(std::move(shape), std::move(values), requires_grad));
}

void Tape::record(std::string op, std::vector<Tensor> inputs, Tensor output,
                  BackwardFn backward) {
  nodes_.push_back({std::move(op), std::move(inputs), std::move(output), std::move(backward)});
}

Tape* Tape::active() { return g_active_tape; }

Tape::Recording::Recording(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
Tape::Recording::~Recording() { g_active_tape = previous_; }

void record_op(std::string op, std::vector<Tensor> inputs, Tensor& output,
               Tape::BackwardFn fn) {
  Tape* tape = Tape::active();
  if (tape == nullptr) return;
  const bool any = std::any_of(inputs.begin(), inputs.end(),
                               [](const Tensor& t) { return t.requires_grad(); });
  if (!any) return;
  output.set_requires_grad(true);
  tape->record(std::move(op), std::move(inputs), output, std::move(fn));
}

BackwardStats backward(Tape& tape, const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1 || loss.rank() != 0) {
    throw ContractError("backward needs a scalar loss, got " +
                        (loss.defined() ? shape_string(loss.shape()) : std::string("undefined")));
  }
  auto& nodes = tape.nodes();
  std::size_t end = nodes.size();
  while (end > 0 && !nodes[end - 1].output.same(loss)) --end;
  if (end == 0) throw ContractError("loss was not produced on this tape");

  for (std::size_t i = 0; i < end; ++i) {
    Tensor out = nodes[i].output;
    out.zero_grad();
  }
  Tensor seed = loss;
  seed.mutable_grad()[0] = 1.0;

  BackwardStats stats;
  for (std::size_t i = end; i-- > 0;) {
    nodes[i].backward(nodes[i].output);
    ++stats.nodes_visited;
  }
  return stats;
}

}  // namespace swinscan
