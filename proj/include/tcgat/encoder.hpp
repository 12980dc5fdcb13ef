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

// Per-token context features: learned lookup embeddings or externally
// computed contextual vectors (TCEMB1 files), followed by a BiLSTM.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tcgat/corpus.hpp"
#include "tcgat/rng.hpp"
#include "tcgat/tensor.hpp"

namespace tcgat {

inline constexpr std::size_t kLearnedEmbeddingDim = 300;
inline constexpr std::size_t kContextualEmbeddingDim = 768;

/// Frozen per-token vectors keyed by sentence id.
///
/// On-disk layout (little-endian): "TCEMB1", u32 dim, u32 sentence count, then
/// per sentence u16 id length, id bytes, u16 token count L, L*dim float32.
class EmbeddingTable {
 public:
  struct Entry {
    std::size_t tokens = 0;
    std::vector<float> values;  // tokens x dim
  };

  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool contains(const std::string& id) const { return entries_.contains(id); }
  [[nodiscard]] const Entry& at(const std::string& id) const;
  [[nodiscard]] const std::vector<std::string>& ids() const { return order_; }

  void add(const std::string& id, std::size_t tokens, std::vector<float> values);

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  /// Validates the magic and that the byte length matches the header exactly.
  static EmbeddingTable read(std::span<const std::uint8_t> bytes);
  static EmbeddingTable load(const std::filesystem::path& path);

 private:
  std::size_t dim_ = 0;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

/// Lowercased token -> embedding row. Row 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary() : tokens_{kUnkToken} {}
  static Vocabulary build(std::span<const AnnotatedSentence> sentences);
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  [[nodiscard]] std::size_t size() const { return tokens_.size(); }
  [[nodiscard]] std::size_t lookup(const std::string& token) const;
  [[nodiscard]] std::vector<std::size_t> encode(const AnnotatedSentence& s) const;
  [[nodiscard]] const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t> index_;
};

enum class EmbeddingMode { kLearned, kExternal };

/// Rows of the learned table for the sentence's tokens (differentiable).
template <typename T>
BasicTensor<T> embed_learned(const BasicTensor<T>& table, const Vocabulary& vocab, const AnnotatedSentence& s);

/// The sentence's contextual vectors as a constant L x dim tensor. Fails if the
/// id is missing, the vector count differs from the token count, or the dim
/// differs from `expected_dim`.
template <typename T>
BasicTensor<T> embed_external(const EmbeddingTable& table, const AnnotatedSentence& s, std::size_t expected_dim);

/// Column blocks of the 4H gate matrices, in order.
enum class LstmGate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };

template <typename T>
struct LstmDirection {
  BasicTensor<T> w_x;  // input_dim x 4H
  BasicTensor<T> w_h;  // H x 4H
  BasicTensor<T> b;    // 1 x 4H
};

template <typename T>
struct BiLSTMParams {
  std::size_t input_dim = 0;
  std::size_t hidden = 150;
  LstmDirection<T> fwd;
  LstmDirection<T> bwd;

  /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights; forget-gate bias 1.
  static BiLSTMParams init(std::size_t input_dim, std::size_t hidden, const CounterRng& rng);
  static BiLSTMParams zeros(std::size_t input_dim, std::size_t hidden);
};

/// One direction of the recurrence, returning L x H hidden states in input
/// order:
///   [i f o] = sigmoid(x_t W_x + h_{t-1} W_h + b), g = tanh(...)
///   c_t = f * c_{t-1} + i * g,  h_t = o * tanh(c_t)
template <typename T>
BasicTensor<T> lstm_forward(const BasicTensor<T>& x, const LstmDirection<T>& dir, std::size_t hidden, bool reverse);

/// [forward states | backward states], L x 2H.
template <typename T>
BasicTensor<T> bilstm_forward(const BasicTensor<T>& x, const BiLSTMParams<T>& params);

}  // namespace tcgat
