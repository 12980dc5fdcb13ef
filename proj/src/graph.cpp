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
#include "tcgat/graph.hpp"

#include <algorithm>

#include "json.hpp"
#include "tcgat/error.hpp"

namespace tcgat {

BinaryMatrix BinaryMatrix::identity(std::size_t n) {
  BinaryMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i);
  return m;
}

BinaryMatrix BinaryMatrix::transposed() const {
  BinaryMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) t.set(j, i, (*this)(i, j) != 0);
  }
  return t;
}

bool BinaryMatrix::row_nonzero(std::size_t i) const {
  const auto row = std::span(cells_).subspan(i * n_, n_);
  return std::any_of(row.begin(), row.end(), [](std::uint8_t v) { return v != 0; });
}

std::size_t BinaryMatrix::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

char time_state_symbol(TimeState state) {
  constexpr char kSymbols[] = {'B', 'A', 'S', 'I', 'M', 'N'};
  return kSymbols[static_cast<std::size_t>(state)];
}

TimeState time_state_of(TemporalRel rel) {
  switch (rel) {
    case TemporalRel::kB: return TimeState::kB;
    case TemporalRel::kA: return TimeState::kA;
    case TemporalRel::kS: return TimeState::kS;
    case TemporalRel::kI: return TimeState::kI;
    case TemporalRel::kN: return TimeState::kN;
  }
  return TimeState::kM;
}

std::vector<bool> m_state_tokens(const AnnotatedSentence& s) {
  std::vector<bool> in(s.size(), false);
  for (const auto& r : s.temporal) in[r.head] = in[r.tail] = true;
  return in;
}

TimeMatrices build_time_matrices(const AnnotatedSentence& s) {
  const auto n = s.size();
  TimeMatrices tm;
  for (auto& m : tm.adj) m = BinaryMatrix(n);
  for (const auto& r : s.temporal) tm[time_state_of(r.rel)].set(r.head, r.tail);
  // Related tokens carry M; isolated ones get the fallback self-loop. Both
  // land on the diagonal, so adj_M is the identity.
  for (std::size_t i = 0; i < n; ++i) tm[TimeState::kM].set(i, i);
  return tm;
}

std::size_t CausalKG::intern(const std::string& token) {
  auto [it, fresh] = ids_.emplace(token, names_.size());
  if (fresh) names_.push_back(token);
  return it->second;
}

void CausalKG::add_edge(const std::string& cause, const std::string& effect, std::size_t count) {
  const auto c = intern(cause);
  const auto e = intern(effect);
  if (c == e || count == 0) return;
  edges_[{c, e}] += count;
}

void CausalKG::merge(const CausalKG& other) {
  for (const auto& name : other.names_) intern(name);
  for (const auto& [edge, count] : other.edges_) add_edge(other.names_[edge.first], other.names_[edge.second], count);
}

std::size_t CausalKG::edge_weight(const std::string& cause, const std::string& effect) const {
  const auto c = ids_.find(cause);
  const auto e = ids_.find(effect);
  if (c == ids_.end() || e == ids_.end()) return 0;
  const auto it = edges_.find({c->second, e->second});
  return it == edges_.end() ? 0 : it->second;
}

std::string CausalKG::to_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = names_;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [edge, count] : edges_) {
    nlohmann::ordered_json e;
    e["cause"] = names_[edge.first];
    e["effect"] = names_[edge.second];
    e["count"] = count;
    edges.push_back(std::move(e));
  }
  j["edges"] = std::move(edges);
  return j.dump(2);
}

CausalKG CausalKG::from_json(std::string_view text) {
  CausalKG kg;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& n : j.at("nodes")) kg.intern(n.get<std::string>());
    for (const auto& e : j.at("edges")) {
      const auto count = e.at("count").get<std::size_t>();
      if (count == 0) fail(ErrorKind::kValidation, "knowledge graph edge with zero count");
      kg.add_edge(e.at("cause").get<std::string>(), e.at("effect").get<std::string>(), count);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, std::string("malformed knowledge graph: ") + e.what());
  }
  return kg;
}

CausalKG build_causal_kg(std::span<const AnnotatedSentence> train) {
  CausalKG kg;
  for (const auto& s : train) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.causal_tags[i] != CausalTag::kC) continue;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (s.causal_tags[j] == CausalTag::kE) kg.add_edge(normalize_token(s.tokens[i]), normalize_token(s.tokens[j]));
      }
    }
  }
  return kg;
}

BinaryMatrix sentence_causal_adj(const CausalKG& kg, const AnnotatedSentence& s) {
  auto adj = BinaryMatrix::identity(s.size());
  std::vector<std::string> norm;
  norm.reserve(s.size());
  for (const auto& t : s.tokens) norm.push_back(normalize_token(t));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (kg.linked(norm[i], norm[j])) {
        adj.set(i, j);
        adj.set(j, i);
      }
    }
  }
  return adj;
}

std::string matrices_to_json(const AnnotatedSentence& s, const TimeMatrices& tm, const BinaryMatrix& kg_adj) {
  const auto rows = [](const BinaryMatrix& m) {
    auto out = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      std::vector<int> row(m.size());
      for (std::size_t j = 0; j < m.size(); ++j) row[j] = m(i, j);
      out.push_back(row);
    }
    return out;
  };
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["tokens"] = s.tokens;
  for (auto state : kTimeStates) j[std::string("adj_") + time_state_symbol(state)] = rows(tm[state]);
  j["adj_KG"] = rows(kg_adj);
  return j.dump();
}

}  // namespace tcgat
