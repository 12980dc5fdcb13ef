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
#include "tcgat/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "tcgat/error.hpp"

namespace tcgat {

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {

template <typename T>
using Node = detail::Node<T>;
template <typename T>
using NodePtr = std::shared_ptr<Node<T>>;
template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::atomic<std::uint64_t> g_clamp_count{0};

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  fail(ErrorKind::kArgument, std::string(op) + ": shape mismatch: " + detail);
}

template <typename T>
void require_matrix(const char* op, const BasicTensor<T>& a) {
  if (!a.defined()) fail(ErrorKind::kArgument, std::string(op) + ": undefined tensor");
  if (a.rank() != 2) shape_error(op, "expected a matrix, got " + shape_string(a.shape()));
}

template <typename T>
BasicTensor<T> make_result(const char* op, Shape shape, std::vector<T> value,
                           std::vector<NodePtr<T>> parents,
                           std::function<void(Node<T>&)> backward) {
  for (const T& v : value) {
    if (!std::isfinite(v)) fail(ErrorKind::kNumerical, std::string("non-finite value produced by ") + op);
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  node->requires_grad =
      std::any_of(parents.begin(), parents.end(), [](const auto& p) { return p->requires_grad; });
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return BasicTensor<T>(std::move(node));
}

template <typename T>
Eigen::Map<const RowMajor<T>> view(const std::vector<T>& v, std::size_t r, std::size_t c) {
  return {v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)};
}

template <typename T>
Eigen::Map<RowMajor<T>> view(std::vector<T>& v, std::size_t r, std::size_t c) {
  return {v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)};
}

template <typename T, typename Fn, typename DFn>
BasicTensor<T> unary(const char* op, const BasicTensor<T>& a, Fn fn, DFn dfn) {
  require_matrix(op, a);
  std::vector<T> out(a.numel());
  std::transform(a.data().begin(), a.data().end(), out.begin(), fn);
  return make_result<T>(op, a.shape(), std::move(out), {a.node()}, [dfn](Node<T>& self) {
    auto& in = *self.parents[0];
    if (!in.requires_grad) return;
    auto& g = in.grad_buffer();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad[k] * dfn(in.value[k], self.value[k]);
  });
}

}  // namespace

// -- BasicTensor ------------------------------------------------------------------

template <typename T>
BasicTensor<T> BasicTensor<T>::constant(Shape shape, std::vector<T> data) {
  if (shape_numel(shape) != data.size()) {
    fail(ErrorKind::kArgument, "tensor data size " + std::to_string(data.size()) +
                                   " does not match shape " + shape_string(shape));
  }
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  return BasicTensor(std::move(node));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::parameter(Shape shape, std::vector<T> data) {
  auto t = constant(std::move(shape), std::move(data));
  t.node_->requires_grad = true;
  t.node_->op = "parameter";
  return t;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::zeros(Shape shape) {
  const auto n = shape_numel(shape);
  return constant(std::move(shape), std::vector<T>(n, T(0)));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::full(Shape shape, T value) {
  const auto n = shape_numel(shape);
  return constant(std::move(shape), std::vector<T>(n, value));
}

template <typename T>
std::size_t BasicTensor<T>::rows() const {
  return rank() == 0 ? 1 : (rank() == 1 ? 1 : node_->shape[0]);
}

template <typename T>
std::size_t BasicTensor<T>::cols() const {
  return rank() == 0 ? 1 : node_->shape.back();
}

template <typename T>
T BasicTensor<T>::item() const {
  if (numel() != 1) fail(ErrorKind::kArgument, "item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

template <typename T>
std::span<const T> BasicTensor<T>::grad() const {
  return node_->grad_buffer();
}

template <typename T>
void BasicTensor<T>::zero_grad() {
  node_->grad.assign(node_->value.size(), T(0));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::detach() const {
  return constant(shape(), node_->value);
}

template <typename T>
void BasicTensor<T>::backward() const {
  if (numel() != 1) fail(ErrorKind::kArgument, "backward() requires a scalar, got " + shape_string(shape()));
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<detail::Node<T>*> order;
  std::unordered_set<const detail::Node<T>*> seen;
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      auto* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->grad_buffer()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto* n = *it;
    if (n->backward) {
      n->grad_buffer();
      n->backward(*n);
    }
  }
}

// -- structural ops ---------------------------------------------------------------

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_matrix("matmul", a);
  require_matrix("matmul", b);
  const auto m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) shape_error("matmul", shape_string(a.shape()) + " x " + shape_string(b.shape()));
  std::vector<T> out(m * n);
  view(out, m, n).noalias() = view(a.node()->value, m, k) * view(b.node()->value, k, n);
  return make_result<T>("matmul", {m, n}, std::move(out), {a.node(), b.node()},
                        [m, k, n](Node<T>& self) {
                          auto& pa = *self.parents[0];
                          auto& pb = *self.parents[1];
                          auto dy = view(std::as_const(self.grad), m, n);
                          if (pa.requires_grad) {
                            view(pa.grad_buffer(), m, k).noalias() +=
                                dy * view(std::as_const(pb.value), k, n).transpose();
                          }
                          if (pb.requires_grad) {
                            view(pb.grad_buffer(), k, n).noalias() +=
                                view(std::as_const(pa.value), m, k).transpose() * dy;
                          }
                        });
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_matrix("add", a);
  require_matrix("add", b);
  const bool broadcast = a.shape() != b.shape();
  if (broadcast && !(b.rows() == 1 && b.cols() == a.cols())) {
    shape_error("add", shape_string(a.shape()) + " + " + shape_string(b.shape()));
  }
  const auto cols = a.cols();
  std::vector<T> out(a.data().begin(), a.data().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += b.data()[broadcast ? k % cols : k];
  return make_result<T>("add", a.shape(), std::move(out), {a.node(), b.node()},
                        [broadcast, cols](Node<T>& self) {
                          auto& pa = *self.parents[0];
                          auto& pb = *self.parents[1];
                          if (pa.requires_grad) {
                            auto& g = pa.grad_buffer();
                            for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad[k];
                          }
                          if (pb.requires_grad) {
                            auto& g = pb.grad_buffer();
                            for (std::size_t k = 0; k < self.grad.size(); ++k) {
                              g[broadcast ? k % cols : k] += self.grad[k];
                            }
                          }
                        });
}

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_matrix("sub", a);
  require_matrix("sub", b);
  if (a.shape() != b.shape()) shape_error("sub", shape_string(a.shape()) + " - " + shape_string(b.shape()));
  std::vector<T> out(a.numel());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] - b.data()[k];
  return make_result<T>("sub", a.shape(), std::move(out), {a.node(), b.node()}, [](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto& g = pa.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad[k];
    }
    if (pb.requires_grad) {
      auto& g = pb.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] -= self.grad[k];
    }
  });
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_matrix("mul", a);
  require_matrix("mul", b);
  if (a.shape() != b.shape()) shape_error("mul", shape_string(a.shape()) + " * " + shape_string(b.shape()));
  std::vector<T> out(a.numel());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] * b.data()[k];
  return make_result<T>("mul", a.shape(), std::move(out), {a.node(), b.node()}, [](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto& g = pa.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad[k] * pb.value[k];
    }
    if (pb.requires_grad) {
      auto& g = pb.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad[k] * pa.value[k];
    }
  });
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
  return unary<T>("scale", a, [factor](T x) { return x * factor; },
                  [factor](T, T) { return factor; });
}

template <typename T>
BasicTensor<T> concat(std::span<const BasicTensor<T>> parts, std::size_t axis) {
  if (parts.empty()) fail(ErrorKind::kArgument, "concat: no inputs");
  if (axis > 1) fail(ErrorKind::kArgument, "concat: axis must be 0 or 1");
  for (const auto& p : parts) require_matrix("concat", p);
  const std::size_t fixed = axis == 0 ? parts[0].cols() : parts[0].rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if ((axis == 0 ? p.cols() : p.rows()) != fixed) {
      shape_error("concat", shape_string(p.shape()) + " vs " + shape_string(parts[0].shape()));
    }
    total += axis == 0 ? p.rows() : p.cols();
  }
  const std::size_t rows = axis == 0 ? total : fixed;
  const std::size_t cols = axis == 0 ? fixed : total;
  std::vector<T> out(rows * cols);
  std::vector<NodePtr<T>> parents;
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    offsets.push_back(offset);
    if (axis == 0) {
      std::copy(p.data().begin(), p.data().end(), out.begin() + static_cast<std::ptrdiff_t>(offset * cols));
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < p.cols(); ++c) out[r * cols + offset + c] = p.at(r, c);
      }
    }
    offset += axis == 0 ? p.rows() : p.cols();
    parents.push_back(p.node());
  }
  return make_result<T>("concat", {rows, cols}, std::move(out), std::move(parents),
                        [axis, cols, offsets](Node<T>& self) {
                          for (std::size_t i = 0; i < self.parents.size(); ++i) {
                            auto& p = *self.parents[i];
                            if (!p.requires_grad) continue;
                            auto& g = p.grad_buffer();
                            const auto pr = p.shape[0], pc = p.shape[1];
                            for (std::size_t r = 0; r < pr; ++r) {
                              for (std::size_t c = 0; c < pc; ++c) {
                                const auto src = axis == 0 ? (offsets[i] + r) * cols + c
                                                           : r * cols + offsets[i] + c;
                                g[r * pc + c] += self.grad[src];
                              }
                            }
                          }
                        });
}

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a) {
  require_matrix("transpose", a);
  const auto m = a.rows(), n = a.cols();
  std::vector<T> out(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) out[c * m + r] = a.at(r, c);
  }
  return make_result<T>("transpose", {n, m}, std::move(out), {a.node()}, [m, n](Node<T>& self) {
    auto& p = *self.parents[0];
    auto& g = p.grad_buffer();
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < n; ++c) g[r * n + c] += self.grad[c * m + r];
    }
  });
}

template <typename T>
BasicTensor<T> slice_rows(const BasicTensor<T>& a, std::size_t begin, std::size_t count) {
  require_matrix("slice_rows", a);
  if (count == 0 || begin + count > a.rows()) {
    shape_error("slice_rows", "rows [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                                  ") of " + shape_string(a.shape()));
  }
  const auto cols = a.cols();
  const auto first = a.data().begin() + static_cast<std::ptrdiff_t>(begin * cols);
  std::vector<T> out(first, first + static_cast<std::ptrdiff_t>(count * cols));
  return make_result<T>("slice_rows", {count, cols}, std::move(out), {a.node()},
                        [begin, cols](Node<T>& self) {
                          auto& g = self.parents[0]->grad_buffer();
                          for (std::size_t k = 0; k < self.grad.size(); ++k) g[begin * cols + k] += self.grad[k];
                        });
}

template <typename T>
BasicTensor<T> slice_cols(const BasicTensor<T>& a, std::size_t begin, std::size_t count) {
  require_matrix("slice_cols", a);
  if (count == 0 || begin + count > a.cols()) {
    shape_error("slice_cols", "cols [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                                  ") of " + shape_string(a.shape()));
  }
  const auto rows = a.rows(), cols = a.cols();
  std::vector<T> out(rows * count);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) out[r * count + c] = a.at(r, begin + c);
  }
  return make_result<T>("slice_cols", {rows, count}, std::move(out), {a.node()},
                        [begin, count, cols, rows](Node<T>& self) {
                          auto& g = self.parents[0]->grad_buffer();
                          for (std::size_t r = 0; r < rows; ++r) {
                            for (std::size_t c = 0; c < count; ++c) g[r * cols + begin + c] += self.grad[r * count + c];
                          }
                        });
}

template <typename T>
BasicTensor<T> gather_rows(const BasicTensor<T>& table, std::span<const std::size_t> indices) {
  require_matrix("gather_rows", table);
  if (indices.empty()) fail(ErrorKind::kArgument, "gather_rows: no indices");
  const auto cols = table.cols();
  std::vector<T> out;
  out.reserve(indices.size() * cols);
  for (auto idx : indices) {
    if (idx >= table.rows()) {
      fail(ErrorKind::kArgument, "gather_rows: index " + std::to_string(idx) + " out of range for " +
                                     shape_string(table.shape()));
    }
    const auto row = table.data().subspan(idx * cols, cols);
    out.insert(out.end(), row.begin(), row.end());
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_result<T>("gather_rows", {idx.size(), cols}, std::move(out), {table.node()},
                        [idx, cols](Node<T>& self) {
                          auto& g = self.parents[0]->grad_buffer();
                          for (std::size_t r = 0; r < idx.size(); ++r) {
                            for (std::size_t c = 0; c < cols; ++c) g[idx[r] * cols + c] += self.grad[r * cols + c];
                          }
                        });
}

template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& a) {
  require_matrix("sum", a);
  double acc = 0.0;
  for (T v : a.data()) acc += static_cast<double>(v);
  return make_result<T>("sum", {1, 1}, {static_cast<T>(acc)}, {a.node()}, [](Node<T>& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& a) {
  require_matrix("mean", a);
  return scale(sum(a), T(1) / static_cast<T>(a.numel()));
}

// -- activations --------------------------------------------------------------------

template <typename T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& a, T slope) {
  return unary<T>("leaky_relu", a, [slope](T x) { return x >= T(0) ? x : slope * x; },
                  [slope](T x, T) { return x >= T(0) ? T(1) : slope; });
}

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& a) {
  return unary<T>(
      "sigmoid", a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
BasicTensor<T> tanh(const BasicTensor<T>& a) {
  return unary<T>("tanh", a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
BasicTensor<T> elu(const BasicTensor<T>& a, T alpha) {
  return unary<T>("elu", a, [alpha](T x) { return x > T(0) ? x : alpha * std::expm1(x); },
                  [alpha](T x, T y) { return x > T(0) ? T(1) : y + alpha; });
}

// -- softmax / dropout / loss ---------------------------------------------------------

template <typename T>
BasicTensor<T> masked_softmax(const BasicTensor<T>& scores, std::span<const std::uint8_t> mask,
                              std::size_t axis, MaskMode mode, EmptySlice empty) {
  require_matrix("masked_softmax", scores);
  if (mask.size() != scores.numel()) {
    shape_error("masked_softmax", "mask of " + std::to_string(mask.size()) + " entries for scores " +
                                      shape_string(scores.shape()));
  }
  if (axis > 1) fail(ErrorKind::kArgument, "masked_softmax: axis must be 0 or 1");
  const auto rows = scores.rows(), cols = scores.cols();
  const std::size_t slices = axis == 1 ? rows : cols;
  const std::size_t width = axis == 1 ? cols : rows;
  const auto index = [=](std::size_t s, std::size_t k) { return axis == 1 ? s * cols + k : k * cols + s; };

  const auto x = scores.data();
  std::vector<T> out(scores.numel(), T(0));
  std::vector<T> full;  // unmasked softmax, literal mode only
  if (mode == MaskMode::kLiteral) full.assign(scores.numel(), T(0));

  for (std::size_t s = 0; s < slices; ++s) {
    const bool literal = mode == MaskMode::kLiteral;
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t active = 0;
    for (std::size_t k = 0; k < width; ++k) {
      const auto i = index(s, k);
      if (literal || mask[i]) {
        hi = std::max(hi, static_cast<double>(x[i]));
        ++active;
      }
    }
    if (!literal && active == 0) {
      if (empty == EmptySlice::kError) {
        fail(ErrorKind::kNumerical, "masked_softmax: slice " + std::to_string(s) + " is fully masked");
      }
      continue;
    }
    double z = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const auto i = index(s, k);
      if (literal || mask[i]) z += std::exp(static_cast<double>(x[i]) - hi);
    }
    for (std::size_t k = 0; k < width; ++k) {
      const auto i = index(s, k);
      if (literal) {
        full[i] = static_cast<T>(std::exp(static_cast<double>(x[i]) - hi) / z);
        out[i] = mask[i] ? full[i] : T(0);
      } else if (mask[i]) {
        out[i] = static_cast<T>(std::exp(static_cast<double>(x[i]) - hi) / z);
      }
    }
  }

  std::vector<std::uint8_t> keep(mask.begin(), mask.end());
  return make_result<T>(
      "masked_softmax", scores.shape(), std::move(out), {scores.node()},
      [=, full = std::move(full), keep = std::move(keep)](Node<T>& self) {
        auto& g = self.parents[0]->grad_buffer();
        const bool literal = mode == MaskMode::kLiteral;
        const auto& y = literal ? full : self.value;
        for (std::size_t s = 0; s < slices; ++s) {
          double dot = 0.0;
          for (std::size_t k = 0; k < width; ++k) {
            const auto i = index(s, k);
            const double dy = literal ? (keep[i] ? self.grad[i] : T(0)) : self.grad[i];
            dot += static_cast<double>(y[i]) * dy;
          }
          for (std::size_t k = 0; k < width; ++k) {
            const auto i = index(s, k);
            const double dy = literal ? (keep[i] ? self.grad[i] : T(0)) : self.grad[i];
            g[i] += static_cast<T>(static_cast<double>(y[i]) * (dy - dot));
          }
        }
      });
}

template <typename T>
BasicTensor<T> softmax_rows(const BasicTensor<T>& scores) {
  const std::vector<std::uint8_t> all(scores.numel(), 1);
  return masked_softmax(scores, std::span<const std::uint8_t>(all), 1, MaskMode::kRenormalize);
}

template <typename T>
BasicTensor<T> dropout(const BasicTensor<T>& a, double p, bool train, const CounterRng& rng) {
  require_matrix("dropout", a);
  if (!(p >= 0.0 && p < 1.0)) fail(ErrorKind::kArgument, "dropout: p must be in [0, 1)");
  if (!train || p == 0.0) return a;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> factor(a.numel());
  for (std::size_t k = 0; k < factor.size(); ++k) factor[k] = rng.uniform(k) >= p ? keep_scale : T(0);
  std::vector<T> out(a.numel());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] * factor[k];
  return make_result<T>("dropout", a.shape(), std::move(out), {a.node()},
                        [factor = std::move(factor)](Node<T>& self) {
                          auto& g = self.parents[0]->grad_buffer();
                          for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad[k] * factor[k];
                        });
}

template <typename T>
BasicTensor<T> cross_entropy(const BasicTensor<T>& probs, const BasicTensor<T>& one_hot) {
  require_matrix("cross_entropy", probs);
  require_matrix("cross_entropy", one_hot);
  if (probs.shape() != one_hot.shape()) {
    shape_error("cross_entropy", shape_string(probs.shape()) + " vs " + shape_string(one_hot.shape()));
  }
  const auto rows = probs.rows();
  const auto p = probs.data();
  const auto y = one_hot.data();
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (y[k] == T(0)) continue;
    double pk = static_cast<double>(p[k]);
    if (pk < kProbabilityFloor) {
      pk = kProbabilityFloor;
      g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    }
    total -= static_cast<double>(y[k]) * std::log(pk);
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);
  return make_result<T>("cross_entropy", {1, 1}, {static_cast<T>(total * inv_rows)},
                        {probs.node(), one_hot.node()}, [inv_rows](Node<T>& self) {
                          auto& pp = *self.parents[0];
                          auto& py = *self.parents[1];
                          const double up = static_cast<double>(self.grad[0]) * inv_rows;
                          for (std::size_t k = 0; k < pp.value.size(); ++k) {
                            const double pk = std::max(static_cast<double>(pp.value[k]), kProbabilityFloor);
                            if (pp.requires_grad && py.value[k] != T(0)) {
                              pp.grad_buffer()[k] -= static_cast<T>(up * static_cast<double>(py.value[k]) / pk);
                            }
                            if (py.requires_grad) py.grad_buffer()[k] -= static_cast<T>(up * std::log(pk));
                          }
                        });
}

std::uint64_t cross_entropy_clamp_count() { return g_clamp_count.load(std::memory_order_relaxed); }

// -- gradient check ---------------------------------------------------------------------

template <typename T>
GradCheckResult grad_check(const std::function<BasicTensor<T>(const std::vector<BasicTensor<T>>&)>& f,
                           std::vector<BasicTensor<T>>& inputs, double eps) {
  for (auto& in : inputs) {
    if (!in.requires_grad()) fail(ErrorKind::kArgument, "grad_check: inputs must be parameters");
    in.zero_grad();
  }
  f(inputs).backward();
  std::vector<std::vector<T>> analytic;
  for (const auto& in : inputs) analytic.emplace_back(in.grad().begin(), in.grad().end());

  GradCheckResult result;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto data = inputs[i].mutable_data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      const T saved = data[k];
      data[k] = static_cast<T>(saved + eps);
      const double up = static_cast<double>(f(inputs).item());
      data[k] = static_cast<T>(saved - eps);
      const double down = static_cast<double>(f(inputs).item());
      data[k] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      if (!std::isfinite(numeric)) {
        fail(ErrorKind::kNumerical, "grad_check: non-finite difference at input " + std::to_string(i) +
                                        " index " + std::to_string(k));
      }
      const double a = static_cast<double>(analytic[i][k]);
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      ++result.coordinates;
      if (rel > result.max_rel_error || result.coordinates == 1) {
        result.max_rel_error = rel;
        result.worst_input = i;
        result.worst_index = k;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  for (auto& in : inputs) in.zero_grad();
  return result;
}

// -- explicit instantiations ---------------------------------------------------------------

#define TCGAT_INSTANTIATE_TENSOR(T)                                                                   \
  template class BasicTensor<T>;                                                                      \
  template BasicTensor<T> matmul(const BasicTensor<T>&, const BasicTensor<T>&);                       \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);                          \
  template BasicTensor<T> sub(const BasicTensor<T>&, const BasicTensor<T>&);                          \
  template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);                          \
  template BasicTensor<T> scale(const BasicTensor<T>&, T);                                            \
  template BasicTensor<T> concat(std::span<const BasicTensor<T>>, std::size_t);                       \
  template BasicTensor<T> transpose(const BasicTensor<T>&);                                           \
  template BasicTensor<T> slice_rows(const BasicTensor<T>&, std::size_t, std::size_t);                \
  template BasicTensor<T> slice_cols(const BasicTensor<T>&, std::size_t, std::size_t);                \
  template BasicTensor<T> gather_rows(const BasicTensor<T>&, std::span<const std::size_t>);           \
  template BasicTensor<T> sum(const BasicTensor<T>&);                                                 \
  template BasicTensor<T> mean(const BasicTensor<T>&);                                                \
  template BasicTensor<T> leaky_relu(const BasicTensor<T>&, T);                                       \
  template BasicTensor<T> sigmoid(const BasicTensor<T>&);                                             \
  template BasicTensor<T> tanh(const BasicTensor<T>&);                                                \
  template BasicTensor<T> elu(const BasicTensor<T>&, T);                                              \
  template BasicTensor<T> masked_softmax(const BasicTensor<T>&, std::span<const std::uint8_t>,        \
                                         std::size_t, MaskMode, EmptySlice);                          \
  template BasicTensor<T> softmax_rows(const BasicTensor<T>&);                                        \
  template BasicTensor<T> dropout(const BasicTensor<T>&, double, bool, const CounterRng&);            \
  template BasicTensor<T> cross_entropy(const BasicTensor<T>&, const BasicTensor<T>&);                \
  template GradCheckResult grad_check(                                                                \
      const std::function<BasicTensor<T>(const std::vector<BasicTensor<T>>&)>&,                       \
      std::vector<BasicTensor<T>>&, double);

TCGAT_INSTANTIATE_TENSOR(float)
TCGAT_INSTANTIATE_TENSOR(double)

#undef TCGAT_INSTANTIATE_TENSOR

}  // namespace tcgat
