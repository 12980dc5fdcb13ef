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
#include <span>
#include <string>

#include "tcgat/corpus.hpp"

namespace tcgat {

/// counts[gold][predicted] over classes {O, C, E}.
struct Confusion {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  void add(CausalTag gold, CausalTag predicted) {
    ++counts[static_cast<std::size_t>(gold)][static_cast<std::size_t>(predicted)];
  }
  void add(std::span<const CausalTag> gold, std::span<const CausalTag> predicted);
  Confusion& operator+=(const Confusion& other);
  [[nodiscard]] std::size_t total() const;
  bool operator==(const Confusion&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // gold tokens of the class
  std::size_t predicted = 0;  // tokens predicted as the class
  /// No gold token of this class; P/R/F1 are reported as 0.
  bool absent = false;

  bool operator==(const ClassMetrics&) const = default;
};

/// 2PR / (P + R), or 0 when P + R == 0.
double f1_score(double precision, double recall);
/// Mean of the cause and effect F1 scores.
double macro_f1(double f1_cause, double f1_effect);

ClassMetrics class_metrics(const Confusion& confusion, CausalTag tag);

struct EvalReport {
  ClassMetrics cause;
  ClassMetrics effect;
  double macro_f1 = 0.0;
  Confusion confusion;
  std::size_t sentences = 0;

  static EvalReport from_confusion(const Confusion& confusion, std::size_t sentences);
  [[nodiscard]] std::string to_json() const;
  /// Aligned plain-text table.
  [[nodiscard]] std::string to_table() const;
  bool operator==(const EvalReport&) const = default;
};

}  // namespace tcgat
