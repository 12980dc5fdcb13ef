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

// Full token labeler: embeddings -> BiLSTM -> {T-GAT, C-GAT} -> equilibrium
// gate with the context branch -> 3-way classifier.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tcgat/config.hpp"
#include "tcgat/encoder.hpp"
#include "tcgat/equilibrium.hpp"
#include "tcgat/gat.hpp"
#include "tcgat/graph.hpp"

namespace tcgat {

template <typename T>
using NamedParameters = std::vector<std::pair<std::string, BasicTensor<T>>>;

/// Everything per sentence that does not depend on parameters.
struct SentenceInputs {
  const AnnotatedSentence* sentence = nullptr;
  TimeMatrices time;
  BinaryMatrix causal;
  std::vector<std::size_t> token_ids;  // learned mode
};

SentenceInputs prepare_inputs(const AnnotatedSentence& s, const CausalKG& kg, const Vocabulary& vocab);

template <typename T>
struct Network {
  EmbeddingMode mode = EmbeddingMode::kLearned;
  /// Learned mode: vocab x embed_dim lookup table.
  BasicTensor<T> embedding;
  /// External mode: context_dim x embed_dim map from contextual vectors to
  /// the BiLSTM input width.
  BasicTensor<T> input_proj;
  BiLSTMParams<T> bilstm;
  TGATParams<T> tgat;
  CGATParams<T> cgat;
  EquilibriumParams<T> fuse;
  ClassifierParams<T> classifier;

  /// Stable, sorted-by-role names used by checkpoints.
  [[nodiscard]] NamedParameters<T> named_parameters() const;

  /// `context_dim` is the external vector width (ignored in learned mode).
  static Network init(const TrainConfig& config, std::size_t vocab_size, EmbeddingMode mode,
                      std::size_t context_dim, std::uint64_t seed);
};

template <typename T>
struct ForwardTrace {
  BasicTensor<T> context;   // embeddings or external vectors, L x ctx
  BasicTensor<T> encoded;   // BiLSTM output
  BasicTensor<T> tgat;      // L x (tgat heads * dim)
  BasicTensor<T> cgat;      // L x (cgat heads * dim)
  BasicTensor<T> tc_input;  // [tgat | cgat] after variant zeroing
  BasicTensor<T> h_tc;      // projected temporal-causal branch
  BasicTensor<T> h_ctx;     // projected context branch
  BasicTensor<T> gate;      // undefined when the variant bypasses the gate
  BasicTensor<T> fused;
  BasicTensor<T> probs;     // L x 3
};

template <typename T>
ForwardTrace<T> forward(const Network<T>& net, const TrainConfig& config, const SentenceInputs& in,
                        const EmbeddingTable* external, const DropoutContext& dropout = {});

}  // namespace tcgat
