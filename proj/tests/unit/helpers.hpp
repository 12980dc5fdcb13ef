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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tcgat/corpus.hpp"
#include "tcgat/graph.hpp"
#include "tcgat/rng.hpp"
#include "tcgat/tensor.hpp"

namespace tcgat::test {

// "The rain caused the floods", tags O C O O E, relation (1, 4, B).
inline AnnotatedSentence rain_floods() {
  AnnotatedSentence s{"ex1",
                      {"The", "rain", "caused", "the", "floods"},
                      {CausalTag::kO, CausalTag::kC, CausalTag::kO, CausalTag::kO, CausalTag::kE},
                      {{1, 4, TemporalRel::kB}}};
  normalize(s);
  return s;
}

template <typename T>
BasicTensor<T> random_tensor(std::size_t rows, std::size_t cols, const CounterRng& rng, double lo = -1.0,
                             double hi = 1.0, bool param = false) {
  std::vector<T> v(rows * cols);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<T>(rng.uniform(k, lo, hi));
  return param ? BasicTensor<T>::parameter({rows, cols}, std::move(v))
               : BasicTensor<T>::constant({rows, cols}, std::move(v));
}

template <typename T>
double max_abs_diff(const BasicTensor<T>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) m = std::max(m, std::abs(static_cast<double>(a.data()[k]) - b[k]));
  return a.numel() == b.size() ? m : INFINITY;
}

// Random annotated sentence: consistent relations drawn over random pairs.
// Each unordered pair receives at most one relation; tags are uniform.
inline AnnotatedSentence random_sentence(const CounterRng& rng, std::size_t max_len = 12, double density = 0.25) {
  std::uint64_t c = 0;
  const std::size_t len = 1 + rng.below(c++, max_len);
  AnnotatedSentence s;
  s.id = "r" + std::to_string(rng.stream());
  for (std::size_t i = 0; i < len; ++i) {
    s.tokens.push_back("w" + std::to_string(rng.below(c++, 20)));
    s.causal_tags.push_back(static_cast<CausalTag>(rng.below(c++, kNumClasses)));
  }
  constexpr TemporalRel kRels[] = {TemporalRel::kB, TemporalRel::kA, TemporalRel::kS, TemporalRel::kI,
                                   TemporalRel::kN};
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = i + 1; j < len; ++j) {
      if (rng.uniform(c++) < density) s.temporal.push_back({i, j, kRels[rng.below(c++, 5)]});
    }
  }
  normalize(s);
  return s;
}

}  // namespace tcgat::test
