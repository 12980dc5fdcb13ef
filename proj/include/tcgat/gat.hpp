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

// Masked multi-head graph attention: the relation-typed temporal layer over
// the six time matrices and the single-relation causal layer over the KG
// adjacency.

#include <array>
#include <cstddef>
#include <vector>

#include "tcgat/graph.hpp"
#include "tcgat/rng.hpp"
#include "tcgat/tensor.hpp"

namespace tcgat {

/// Attention-weight dropout. Inactive unless `train` is set.
struct DropoutContext {
  bool train = false;
  CounterRng rng{0};
};

template <typename T>
struct TGATParams {
  std::size_t heads = 3;
  std::size_t dim = 100;  // per head
  T leaky_slope = T(kDefaultLeakySlope);
  double dropout = 0.15;
  MaskMode mask_mode = MaskMode::kRenormalize;
  /// weights[state][head]: in_dim x dim.
  std::array<std::vector<BasicTensor<T>>, kNumTimeStates> weights;
  /// attention[head]: 2*dim x 1. Rows [0, dim) score the M-state (query)
  /// side, rows [dim, 2*dim) the relation (key) side.
  std::vector<BasicTensor<T>> attention;

  [[nodiscard]] const BasicTensor<T>& weight(TimeState s, std::size_t head) const {
    return weights[static_cast<std::size_t>(s)][head];
  }
  [[nodiscard]] std::size_t input_dim() const { return weights[0].at(0).rows(); }
  [[nodiscard]] std::size_t output_dim() const { return heads * dim; }

  /// Glorot-uniform weights.
  static TGATParams init(std::size_t input_dim, std::size_t heads, std::size_t dim, const CounterRng& rng);
};

template <typename T>
struct CGATParams {
  std::size_t heads = 3;
  std::size_t dim = 100;
  T leaky_slope = T(kDefaultLeakySlope);
  double dropout = 0.15;
  std::vector<BasicTensor<T>> weights;    // per head: in_dim x dim
  std::vector<BasicTensor<T>> attention;  // per head: 2*dim x 1

  [[nodiscard]] std::size_t input_dim() const { return weights.at(0).rows(); }
  [[nodiscard]] std::size_t output_dim() const { return heads * dim; }

  static CGATParams init(std::size_t input_dim, std::size_t heads, std::size_t dim, const CounterRng& rng);
};

/// e[i][j] = a_query . query[i] + a_key . key[j]  (L x L).
template <typename T>
BasicTensor<T> pairwise_scores(const BasicTensor<T>& query, const BasicTensor<T>& key, const BasicTensor<T>& attention);

/// Score matrix for one time state and head: query side h W_M, key side h W_I.
template <typename T>
BasicTensor<T> relation_scores(const BasicTensor<T>& h, const TGATParams<T>& params, TimeState state,
                               std::size_t head = 0);

/// Row-wise masked softmax of LeakyReLU(e). All-zero mask rows give all-zero
/// attention rows in both modes.
template <typename T>
BasicTensor<T> relation_attention(const BasicTensor<T>& scores, const BinaryMatrix& adj,
                                  MaskMode mode = MaskMode::kRenormalize, T leaky_slope = T(kDefaultLeakySlope));

/// Per head: ELU(sum over time states of alpha_I (h W_I)); heads concatenated,
/// L x (heads * dim). States are summed in kTimeStates order.
template <typename T>
BasicTensor<T> tgat_layer(const BasicTensor<T>& h, const TimeMatrices& tm, const TGATParams<T>& params,
                          const DropoutContext& dropout = {});

/// Per head: ELU(alpha (h W)) with alpha the masked softmax over adj.
template <typename T>
BasicTensor<T> cgat_layer(const BasicTensor<T>& h, const BinaryMatrix& adj, const CGATParams<T>& params,
                          const DropoutContext& dropout = {});

}  // namespace tcgat
