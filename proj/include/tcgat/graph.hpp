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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcgat/corpus.hpp"

namespace tcgat {

/// Square 0/1 matrix, row-major.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  explicit BinaryMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}
  static BinaryMatrix identity(std::size_t n);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::uint8_t operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, bool on = true) { cells_[i * n_ + j] = on ? 1 : 0; }
  [[nodiscard]] std::span<const std::uint8_t> cells() const { return cells_; }
  [[nodiscard]] BinaryMatrix transposed() const;
  [[nodiscard]] bool is_symmetric() const { return *this == transposed(); }
  [[nodiscard]] bool row_nonzero(std::size_t i) const;
  [[nodiscard]] std::size_t count() const;

  bool operator==(const BinaryMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Attention branches of the temporal layer, in their fixed summation order.
enum class TimeState : std::uint8_t { kB, kA, kS, kI, kM, kN };
inline constexpr std::size_t kNumTimeStates = 6;
inline constexpr std::array<TimeState, kNumTimeStates> kTimeStates = {
    TimeState::kB, TimeState::kA, TimeState::kS, TimeState::kI, TimeState::kM, TimeState::kN};

char time_state_symbol(TimeState state);
TimeState time_state_of(TemporalRel rel);

struct TimeMatrices {
  std::array<BinaryMatrix, kNumTimeStates> adj;

  [[nodiscard]] const BinaryMatrix& operator[](TimeState s) const { return adj[static_cast<std::size_t>(s)]; }
  [[nodiscard]] BinaryMatrix& operator[](TimeState s) { return adj[static_cast<std::size_t>(s)]; }
  [[nodiscard]] std::size_t size() const { return adj[0].size(); }
};

/// adj_X[i][j] = 1 iff (i, j, X) is a relation of the sentence. adj_M is the
/// diagonal: 1 for tokens in at least one relation, and a fallback self-loop
/// for every other token so no row of the summed masks is empty.
TimeMatrices build_time_matrices(const AnnotatedSentence& sentence);

/// Tokens whose adj_M self-loop comes from participating in a relation rather
/// than from the fallback.
std::vector<bool> m_state_tokens(const AnnotatedSentence& sentence);

class CausalKG {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Returns the node id for a token, adding it if new.
  std::size_t intern(const std::string& token);
  void add_edge(const std::string& cause, const std::string& effect, std::size_t count = 1);
  /// Adds every node and edge count of `other`.
  void merge(const CausalKG& other);

  [[nodiscard]] std::size_t node_count() const { return names_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] const std::vector<std::string>& nodes() const { return names_; }
  [[nodiscard]] const std::map<Edge, std::size_t>& edges() const { return edges_; }
  [[nodiscard]] std::size_t edge_weight(const std::string& cause, const std::string& effect) const;
  [[nodiscard]] bool linked(const std::string& a, const std::string& b) const {
    return edge_weight(a, b) > 0 || edge_weight(b, a) > 0;
  }

  /// {"nodes": [...], "edges": [{"cause", "effect", "count"}]}
  [[nodiscard]] std::string to_json() const;
  static CausalKG from_json(std::string_view text);

  bool operator==(const CausalKG&) const = default;

 private:
  std::map<std::string, std::size_t> ids_;
  std::vector<std::string> names_;
  std::map<Edge, std::size_t> edges_;
};

/// One directed edge cause -> effect per (C token, E token) pair of every
/// training sentence, tokens lowercased. Self-edges are dropped.
CausalKG build_causal_kg(std::span<const AnnotatedSentence> train);

/// Self-loops plus adj[i][j] = 1 iff tokens i and j are linked in the KG in
/// either direction.
BinaryMatrix sentence_causal_adj(const CausalKG& kg, const AnnotatedSentence& sentence);

/// JSON rendering of one sentence's matrices, for inspection.
std::string matrices_to_json(const AnnotatedSentence& sentence, const TimeMatrices& tm, const BinaryMatrix& kg_adj);

}  // namespace tcgat
