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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swinscan {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {
struct TensorImpl;
}

/// Dense row-major array of doubles with an optional gradient buffer.
///
/// A Tensor is a shared handle: copies alias the same storage. Values are
/// written once by the operation that creates them; only parameters are
/// mutated afterwards (by initializers and optimizers), through
/// mutable_data().
class Tensor {
 public:
  Tensor();

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;
  bool defined() const { return impl_ != nullptr; }

  std::span<const double> data() const;
  std::span<double> mutable_data();
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);

  /// Empty span until a gradient buffer exists.
  std::span<const double> grad() const;
  /// Allocates the buffer on first use. Const because gradient
  /// accumulation goes through shared handles captured by backward rules.
  std::span<double> mutable_grad() const;
  bool has_grad() const;
  void zero_grad() const;

  /// Deep copy of values; the copy is a leaf without gradient.
  Tensor clone() const;

  bool same(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl);
  std::shared_ptr<detail::TensorImpl> impl_;

  friend class Tape;
  friend Tensor make_result(Shape shape, std::vector<double> values,
                            bool requires_grad);
};

/// Wraps freshly computed values. Throws NumericError on NaN/Inf.
Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad);

/// Eager record of differentiable operations, replayed in reverse by
/// backward(). Recording happens only while a Tape::Recording guard is
/// alive on the current thread and at least one input requires grad.
class Tape {
 public:
  using BackwardFn = std::function<void(const Tensor& output)>;

  struct Node {
    std::string op;
    std::vector<Tensor> inputs;
    Tensor output;
    BackwardFn backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(std::string op, std::vector<Tensor> inputs, Tensor output,
              BackwardFn backward);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  /// Tape receiving records on this thread, or null.
  static Tape* active();

  class Recording {
   public:
    explicit Recording(Tape& tape);
    ~Recording();
    Recording(const Recording&) = delete;
    Recording& operator=(const Recording&) = delete;

   private:
    Tape* previous_;
  };

 private:
  std::vector<Node> nodes_;
};

/// Records `fn` as the backward rule of `output` when any input requires
/// grad and a tape is recording; marks the output as requiring grad.
void record_op(std::string op, std::vector<Tensor> inputs, Tensor& output,
               Tape::BackwardFn fn);

struct BackwardStats {
  std::size_t nodes_visited = 0;
};

/// Reverse-mode sweep from a scalar loss recorded on `tape`. Gradients of
/// leaf tensors accumulate; intermediate gradients are reset first, so
/// replaying the same tape yields the same result.
BackwardStats backward(Tape& tape, const Tensor& loss);

}  // namespace swinscan
