//==============================================================================
// Copyright (c) 2026 The tcgat Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//==============================================================================
#pragma once

// Dense row-major matrices with reverse-mode differentiation.
//
// A BasicTensor is a cheap handle onto a shared graph node. Operations build
// new nodes that remember their parents and a closure that pushes the
// output gradient back to them; BasicTensor::backward() walks that graph in
// reverse topological order. Parameters are leaves created with
// BasicTensor::parameter(); their gradients accumulate across backward passes
// until zero_grad().
//
// Every op is instantiated for float (the model) and double (gradient
// verification by finite differences).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tcgat/rng.hpp"

namespace tcgat {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // allocated on first accumulation
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  std::vector<T>& grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad;
  }
};

}  // namespace detail

template <typename T>
class BasicTensor {
 public:
  using value_type = T;
  using NodePtr = std::shared_ptr<detail::Node<T>>;

  BasicTensor() = default;
  explicit BasicTensor(NodePtr node) : node_(std::move(node)) {}

  static BasicTensor constant(Shape shape, std::vector<T> data);
  static BasicTensor parameter(Shape shape, std::vector<T> data);
  static BasicTensor zeros(Shape shape);
  static BasicTensor full(Shape shape, T value);
  static BasicTensor scalar(T value) { return full({1, 1}, value); }

  [[nodiscard]] bool defined() const { return node_ != nullptr; }
  [[nodiscard]] const Shape& shape() const { return node_->shape; }
  [[nodiscard]] std::size_t rank() const { return node_->shape.size(); }
  [[nodiscard]] std::size_t numel() const { return node_->value.size(); }
  [[nodiscard]] std::size_t rows() const;
  [[nodiscard]] std::size_t cols() const;

  [[nodiscard]] std::span<const T> data() const { return node_->value; }
  /// Mutable access for leaves (optimizer updates, finite differences).
  [[nodiscard]] std::span<T> mutable_data() { return node_->value; }
  [[nodiscard]] T at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  [[nodiscard]] T item() const;

  [[nodiscard]] bool requires_grad() const { return node_->requires_grad; }
  [[nodiscard]] bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  /// Gradient buffer; all zeros if nothing has been accumulated yet.
  [[nodiscard]] std::span<const T> grad() const;
  [[nodiscard]] std::span<T> mutable_grad() { return node_->grad_buffer(); }
  void zero_grad();

  [[nodiscard]] const char* op_name() const { return node_->op; }
  [[nodiscard]] const NodePtr& node() const { return node_; }

  /// Same values, cut from the graph.
  [[nodiscard]] BasicTensor detach() const;

  /// Reverse pass from a 1x1 tensor with seed gradient 1.
  void backward() const;

 private:
  NodePtr node_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

enum class MaskMode {
  kRenormalize,  // masked entries removed before normalization
  kLiteral,      // softmax over the full slice, then multiplied by the mask
};

enum class EmptySlice {
  kError,  // a fully masked slice in renormalizing mode is an error
  kZero,   // a fully masked slice yields an all-zero output slice
};

// -- elementwise / structural ------------------------------------------------

template <typename T> BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);
/// Same-shape sum, or `b` broadcast over rows when b is 1 x cols(a).
template <typename T> BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> scale(const BasicTensor<T>& a, T factor);
template <typename T> BasicTensor<T> concat(std::span<const BasicTensor<T>> parts, std::size_t axis);
template <typename T> BasicTensor<T> transpose(const BasicTensor<T>& a);
template <typename T> BasicTensor<T> slice_rows(const BasicTensor<T>& a, std::size_t begin, std::size_t count);
template <typename T> BasicTensor<T> slice_cols(const BasicTensor<T>& a, std::size_t begin, std::size_t count);
/// Row lookup into a table; repeated indices accumulate gradient.
template <typename T> BasicTensor<T> gather_rows(const BasicTensor<T>& table, std::span<const std::size_t> indices);
template <typename T> BasicTensor<T> sum(const BasicTensor<T>& a);
template <typename T> BasicTensor<T> mean(const BasicTensor<T>& a);

// -- activations -----------------------------------------------------------------

inline constexpr double kDefaultLeakySlope = 0.008;

template <typename T> BasicTensor<T> leaky_relu(const BasicTensor<T>& a, T slope = T(kDefaultLeakySlope));
template <typename T> BasicTensor<T> sigmoid(const BasicTensor<T>& a);
template <typename T> BasicTensor<T> tanh(const BasicTensor<T>& a);
template <typename T> BasicTensor<T> elu(const BasicTensor<T>& a, T alpha = T(1));

// -- normalization / regularization / loss --------------------------------------

/// Softmax along `axis` (1: within each row, 0: within each column) restricted
/// by a binary mask with the same number of elements as `scores`.
template <typename T>
BasicTensor<T> masked_softmax(const BasicTensor<T>& scores, std::span<const std::uint8_t> mask,
                              std::size_t axis = 1, MaskMode mode = MaskMode::kRenormalize,
                              EmptySlice empty = EmptySlice::kError);

/// Plain row-wise softmax.
template <typename T> BasicTensor<T> softmax_rows(const BasicTensor<T>& scores);

/// Inverted dropout. Identity when !train or p == 0. The keep decision for
/// element k is a pure function of (rng, k).
template <typename T>
BasicTensor<T> dropout(const BasicTensor<T>& a, double p, bool train, const CounterRng& rng);

inline constexpr double kProbabilityFloor = 1e-12;

/// Mean over rows of -sum_c one_hot[r][c] * log(probs[r][c]). Probabilities at
/// hot positions are clamped below at kProbabilityFloor; each clamp bumps
/// cross_entropy_clamp_count().
template <typename T>
BasicTensor<T> cross_entropy(const BasicTensor<T>& probs, const BasicTensor<T>& one_hot);

std::uint64_t cross_entropy_clamp_count();

// -- verification ----------------------------------------------------------------

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Denominator floor for relative errors: |a - n| / max(|a|, |n|, floor).
inline constexpr double kGradCheckFloor = 1e-6;

/// Compares the reverse-mode gradient of scalar f with central differences
/// (f(x+eps) - f(x-eps)) / (2 eps) over every coordinate of every input.
/// Inputs must be parameter leaves; f must be deterministic.
template <typename T>
GradCheckResult grad_check(const std::function<BasicTensor<T>(const std::vector<BasicTensor<T>>&)>& f,
                           std::vector<BasicTensor<T>>& inputs, double eps);

/// Element-type conversion; keeps the leaf kind (parameter or constant).
template <typename To, typename From>
BasicTensor<To> cast(const BasicTensor<From>& a) {
  std::vector<To> out(a.data().begin(), a.data().end());
  return a.requires_grad() ? BasicTensor<To>::parameter(a.shape(), std::move(out))
                           : BasicTensor<To>::constant(a.shape(), std::move(out));
}

}  // namespace tcgat
