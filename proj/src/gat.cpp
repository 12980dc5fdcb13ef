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
#include "tcgat/gat.hpp"

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

void check_input(const char* layer, std::size_t rows, std::size_t cols, std::size_t expected_cols,
                 std::size_t adj_size) {
  if (cols != expected_cols || rows != adj_size) {
    fail(ErrorKind::kArgument, std::string(layer) + ": input " + std::to_string(rows) + "x" + std::to_string(cols) +
                                   " vs expected in_dim " + std::to_string(expected_cols) + " and " +
                                   std::to_string(adj_size) + " nodes");
  }
}

}  // namespace

template <typename T>
TGATParams<T> TGATParams<T>::init(std::size_t input_dim, std::size_t heads, std::size_t dim, const CounterRng& rng) {
  if (heads == 0 || dim == 0) fail(ErrorKind::kValidation, "tgat: heads and dim must be positive");
  TGATParams p;
  p.heads = heads;
  p.dim = dim;
  for (std::size_t s = 0; s < kNumTimeStates; ++s) {
    for (std::size_t k = 0; k < heads; ++k) p.weights[s].push_back(glorot<T>(input_dim, dim, rng.derive({s, k})));
  }
  for (std::size_t k = 0; k < heads; ++k) p.attention.push_back(glorot<T>(2 * dim, 1, rng.derive({0xa, k})));
  return p;
}

template <typename T>
CGATParams<T> CGATParams<T>::init(std::size_t input_dim, std::size_t heads, std::size_t dim, const CounterRng& rng) {
  if (heads == 0 || dim == 0) fail(ErrorKind::kValidation, "cgat: heads and dim must be positive");
  CGATParams p;
  p.heads = heads;
  p.dim = dim;
  for (std::size_t k = 0; k < heads; ++k) {
    p.weights.push_back(glorot<T>(input_dim, dim, rng.derive({0xc, k})));
    p.attention.push_back(glorot<T>(2 * dim, 1, rng.derive({0xa, k})));
  }
  return p;
}

template <typename T>
BasicTensor<T> pairwise_scores(const BasicTensor<T>& query, const BasicTensor<T>& key,
                               const BasicTensor<T>& attention) {
  const auto m = query.cols();
  if (key.shape() != query.shape() || attention.rows() != 2 * m || attention.cols() != 1) {
    fail(ErrorKind::kArgument, "pairwise_scores: query " + shape_string(query.shape()) + ", key " +
                                   shape_string(key.shape()) + ", attention " + shape_string(attention.shape()));
  }
  const auto n = query.rows();
  const auto q = matmul(query, slice_rows(attention, 0, m));
  const auto k = matmul(key, slice_rows(attention, m, m));
  const auto ones_row = BasicTensor<T>::full({1, n}, T(1));
  const auto ones_col = BasicTensor<T>::full({n, 1}, T(1));
  return add(matmul(q, ones_row), matmul(ones_col, transpose(k)));
}

template <typename T>
BasicTensor<T> relation_scores(const BasicTensor<T>& h, const TGATParams<T>& p, TimeState state, std::size_t head) {
  if (head >= p.heads) fail(ErrorKind::kArgument, "relation_scores: head out of range");
  return pairwise_scores(matmul(h, p.weight(TimeState::kM, head)), matmul(h, p.weight(state, head)),
                         p.attention[head]);
}

template <typename T>
BasicTensor<T> relation_attention(const BasicTensor<T>& scores, const BinaryMatrix& adj, MaskMode mode,
                                  T leaky_slope) {
  if (scores.rows() != adj.size() || scores.cols() != adj.size()) {
    fail(ErrorKind::kArgument, "relation_attention: scores " + shape_string(scores.shape()) + " vs adjacency of " +
                                   std::to_string(adj.size()) + " nodes");
  }
  return masked_softmax(leaky_relu(scores, leaky_slope), adj.cells(), 1, mode, EmptySlice::kZero);
}

template <typename T>
BasicTensor<T> tgat_layer(const BasicTensor<T>& h, const TimeMatrices& tm, const TGATParams<T>& p,
                          const DropoutContext& drop) {
  check_input("tgat_layer", h.rows(), h.cols(), p.input_dim(), tm.size());
  std::vector<BasicTensor<T>> heads;
  heads.reserve(p.heads);
  for (std::size_t k = 0; k < p.heads; ++k) {
    std::array<BasicTensor<T>, kNumTimeStates> proj;
    for (auto s : kTimeStates) proj[static_cast<std::size_t>(s)] = matmul(h, p.weight(s, k));
    const auto& query = proj[static_cast<std::size_t>(TimeState::kM)];
    BasicTensor<T> acc;
    for (auto s : kTimeStates) {
      const auto& adj = tm[s];
      // An empty mask contributes an exact zero term.
      if (adj.count() == 0) continue;
      const auto& key = proj[static_cast<std::size_t>(s)];
      auto alpha = relation_attention(pairwise_scores(query, key, p.attention[k]), adj, p.mask_mode, p.leaky_slope);
      alpha = dropout(alpha, p.dropout, drop.train, drop.rng.derive({0x7, k, static_cast<std::uint64_t>(s)}));
      const auto term = matmul(alpha, key);
      acc = acc.defined() ? add(acc, term) : term;
    }
    if (!acc.defined()) acc = BasicTensor<T>::zeros({h.rows(), p.dim});
    heads.push_back(elu(acc));
  }
  return concat(std::span<const BasicTensor<T>>(heads), 1);
}

template <typename T>
BasicTensor<T> cgat_layer(const BasicTensor<T>& h, const BinaryMatrix& adj, const CGATParams<T>& p,
                          const DropoutContext& drop) {
  check_input("cgat_layer", h.rows(), h.cols(), p.input_dim(), adj.size());
  std::vector<BasicTensor<T>> heads;
  heads.reserve(p.heads);
  for (std::size_t k = 0; k < p.heads; ++k) {
    const auto z = matmul(h, p.weights[k]);
    const auto e = leaky_relu(pairwise_scores(z, z, p.attention[k]), p.leaky_slope);
    auto alpha = masked_softmax(e, adj.cells(), 1, MaskMode::kRenormalize, EmptySlice::kError);
    alpha = dropout(alpha, p.dropout, drop.train, drop.rng.derive({0xc, k}));
    heads.push_back(elu(matmul(alpha, z)));
  }
  return concat(std::span<const BasicTensor<T>>(heads), 1);
}

#define TCGAT_INSTANTIATE_GAT(T)                                                                               \
  template struct TGATParams<T>;                                                                               \
  template struct CGATParams<T>;                                                                               \
  template BasicTensor<T> pairwise_scores(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&); \
  template BasicTensor<T> relation_scores(const BasicTensor<T>&, const TGATParams<T>&, TimeState, std::size_t); \
  template BasicTensor<T> relation_attention(const BasicTensor<T>&, const BinaryMatrix&, MaskMode, T);         \
  template BasicTensor<T> tgat_layer(const BasicTensor<T>&, const TimeMatrices&, const TGATParams<T>&,         \
                                     const DropoutContext&);                                                   \
  template BasicTensor<T> cgat_layer(const BasicTensor<T>&, const BinaryMatrix&, const CGATParams<T>&,         \
                                     const DropoutContext&);

TCGAT_INSTANTIATE_GAT(float)
TCGAT_INSTANTIATE_GAT(double)

#undef TCGAT_INSTANTIATE_GAT

}  // namespace tcgat
