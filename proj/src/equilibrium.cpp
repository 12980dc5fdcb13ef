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
#include "tcgat/equilibrium.hpp"

#include <cmath>
#include <string>

#include "tcgat/error.hpp"

namespace tcgat {

namespace {

template <typename T>
BasicTensor<T> glorot(std::size_t rows, std::size_t cols, const CounterRng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<T> v(rows * cols);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<T>(rng.uniform(k, -bound, bound));
  return BasicTensor<T>::parameter({rows, cols}, std::move(v));
}

template <typename T>
BasicTensor<T> zero_param(std::size_t rows, std::size_t cols) {
  return BasicTensor<T>::parameter({rows, cols}, std::vector<T>(rows * cols, T(0)));
}

}  // namespace

template <typename T>
EquilibriumParams<T> EquilibriumParams<T>::init(std::size_t tc_dim, std::size_t ctx_dim, std::size_t dim,
                                                const CounterRng& rng) {
  return {glorot<T>(tc_dim, dim, rng.derive({1})), glorot<T>(ctx_dim, dim, rng.derive({2})),
          glorot<T>(dim, dim, rng.derive({3})), zero_param<T>(1, dim)};
}

template <typename T>
ClassifierParams<T> ClassifierParams<T>::init(std::size_t dim, const CounterRng& rng) {
  return {glorot<T>(dim, kNumClasses, rng.derive({1})), zero_param<T>(1, kNumClasses)};
}

template <typename T>
BasicTensor<T> equilibrium_gate(const BasicTensor<T>& h_tc, const BasicTensor<T>& h_ctx,
                                const EquilibriumParams<T>& p) {
  if (h_tc.shape() != h_ctx.shape() || h_tc.cols() != p.gate_w.rows()) {
    fail(ErrorKind::kArgument, "equilibrium: branch shapes " + shape_string(h_tc.shape()) + " and " +
                                   shape_string(h_ctx.shape()) + " vs gate width " + std::to_string(p.gate_w.rows()));
  }
  return sigmoid(add(matmul(add(h_tc, h_ctx), p.gate_w), p.gate_b));
}

template <typename T>
BasicTensor<T> gated_mix(const BasicTensor<T>& gate, const BasicTensor<T>& h_tc, const BasicTensor<T>& h_ctx) {
  return add(mul(gate, h_tc), sub(h_ctx, mul(gate, h_ctx)));
}

template <typename T>
BasicTensor<T> equilibrium_fuse(const BasicTensor<T>& h_tc, const BasicTensor<T>& h_ctx,
                                const EquilibriumParams<T>& p) {
  return gated_mix(equilibrium_gate(h_tc, h_ctx, p), h_tc, h_ctx);
}

template <typename T>
BasicTensor<T> classify(const BasicTensor<T>& h, const ClassifierParams<T>& p) {
  if (h.cols() != p.w.rows()) {
    fail(ErrorKind::kArgument, "classify: features " + shape_string(h.shape()) + " vs weights " +
                                   shape_string(p.w.shape()));
  }
  return softmax_rows(add(matmul(h, p.w), p.b));
}

template <typename T>
BasicTensor<T> one_hot(std::span<const CausalTag> gold) {
  std::vector<T> v(gold.size() * kNumClasses, T(0));
  for (std::size_t i = 0; i < gold.size(); ++i) v[i * kNumClasses + static_cast<std::size_t>(gold[i])] = T(1);
  return BasicTensor<T>::constant({gold.size(), kNumClasses}, std::move(v));
}

template <typename T>
BasicTensor<T> token_loss(const BasicTensor<T>& probs, std::span<const CausalTag> gold) {
  if (probs.rows() != gold.size() || probs.cols() != kNumClasses) {
    fail(ErrorKind::kArgument, "token_loss: probabilities " + shape_string(probs.shape()) + " for " +
                                   std::to_string(gold.size()) + " gold tags");
  }
  return cross_entropy(probs, one_hot<T>(gold));
}

#define TCGAT_INSTANTIATE_EQUILIBRIUM(T)                                                                          \
  template struct EquilibriumParams<T>;                                                                           \
  template struct ClassifierParams<T>;                                                                            \
  template BasicTensor<T> equilibrium_gate(const BasicTensor<T>&, const BasicTensor<T>&, const EquilibriumParams<T>&); \
  template BasicTensor<T> equilibrium_fuse(const BasicTensor<T>&, const BasicTensor<T>&, const EquilibriumParams<T>&); \
  template BasicTensor<T> gated_mix(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);         \
  template BasicTensor<T> classify(const BasicTensor<T>&, const ClassifierParams<T>&);                            \
  template BasicTensor<T> one_hot(std::span<const CausalTag>);                                                    \
  template BasicTensor<T> token_loss(const BasicTensor<T>&, std::span<const CausalTag>);

TCGAT_INSTANTIATE_EQUILIBRIUM(float)
TCGAT_INSTANTIATE_EQUILIBRIUM(double)

#undef TCGAT_INSTANTIATE_EQUILIBRIUM

}  // namespace tcgat
