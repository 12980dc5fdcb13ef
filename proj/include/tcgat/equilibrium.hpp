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

#include <cstddef>
#include <span>

#include "tcgat/corpus.hpp"
#include "tcgat/rng.hpp"
#include "tcgat/tensor.hpp"

namespace tcgat {

template <typename T>
struct EquilibriumParams {
  BasicTensor<T> proj_tc;   // (T-GAT || C-GAT width) x d
  BasicTensor<T> proj_ctx;  // context width x d
  BasicTensor<T> gate_w;    // d x d
  BasicTensor<T> gate_b;    // 1 x d

  [[nodiscard]] std::size_t dim() const { return gate_w.rows(); }
  static EquilibriumParams init(std::size_t tc_dim, std::size_t ctx_dim, std::size_t dim, const CounterRng& rng);
};

template <typename T>
struct ClassifierParams {
  BasicTensor<T> w;  // d x 3
  BasicTensor<T> b;  // 1 x 3

  static ClassifierParams init(std::size_t dim, const CounterRng& rng);
};

/// g = sigmoid((h_tc + h_ctx) W + b), elementwise, for inputs already
/// projected to the common width.
template <typename T>
BasicTensor<T> equilibrium_gate(const BasicTensor<T>& h_tc, const BasicTensor<T>& h_ctx,
                                const EquilibriumParams<T>& params);

/// g * h_tc + (1 - g) * h_ctx.
template <typename T>
BasicTensor<T> equilibrium_fuse(const BasicTensor<T>& h_tc, const BasicTensor<T>& h_ctx,
                                const EquilibriumParams<T>& params);

/// Same as equilibrium_fuse with a precomputed gate.
template <typename T>
BasicTensor<T> gated_mix(const BasicTensor<T>& gate, const BasicTensor<T>& h_tc, const BasicTensor<T>& h_ctx);

/// Per-token distribution over {O, C, E}: softmax(h W + b), L x 3.
template <typename T>
BasicTensor<T> classify(const BasicTensor<T>& h, const ClassifierParams<T>& params);

/// L x 3 one-hot rows for the gold tags.
template <typename T>
BasicTensor<T> one_hot(std::span<const CausalTag> gold);

/// Mean over tokens of -log P(gold); zero probabilities are clamped at 1e-12.
template <typename T>
BasicTensor<T> token_loss(const BasicTensor<T>& probs, std::span<const CausalTag> gold);

}  // namespace tcgat
