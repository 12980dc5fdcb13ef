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
#include "tcgat/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "tcgat/error.hpp"

namespace tcgat {

void Confusion::add(std::span<const CausalTag> gold, std::span<const CausalTag> predicted) {
  if (gold.size() != predicted.size()) fail(ErrorKind::kArgument, "confusion: gold/predicted length mismatch");
  for (std::size_t i = 0; i < gold.size(); ++i) add(gold[i], predicted[i]);
}

Confusion& Confusion::operator+=(const Confusion& other) {
  for (std::size_t g = 0; g < kNumClasses; ++g) {
    for (std::size_t p = 0; p < kNumClasses; ++p) counts[g][p] += other.counts[g][p];
  }
  return *this;
}

std::size_t Confusion::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double macro_f1(double f1_cause, double f1_effect) { return (f1_cause + f1_effect) / 2.0; }

ClassMetrics class_metrics(const Confusion& confusion, CausalTag tag) {
  const auto c = static_cast<std::size_t>(tag);
  ClassMetrics m;
  const auto tp = confusion.counts[c][c];
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    m.support += confusion.counts[c][k];
    m.predicted += confusion.counts[k][c];
  }
  m.absent = m.support == 0;
  if (m.absent) return m;
  m.precision = m.predicted ? static_cast<double>(tp) / static_cast<double>(m.predicted) : 0.0;
  m.recall = static_cast<double>(tp) / static_cast<double>(m.support);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

EvalReport EvalReport::from_confusion(const Confusion& confusion, std::size_t sentences) {
  EvalReport r;
  r.confusion = confusion;
  r.sentences = sentences;
  r.cause = class_metrics(confusion, CausalTag::kC);
  r.effect = class_metrics(confusion, CausalTag::kE);
  r.macro_f1 = tcgat::macro_f1(r.cause.f1, r.effect.f1);
  return r;
}

std::string EvalReport::to_json() const {
  const auto cls = [](const ClassMetrics& m) {
    nlohmann::ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["support"] = m.support;
    j["predicted"] = m.predicted;
    j["absent"] = m.absent;
    return j;
  };
  nlohmann::ordered_json j;
  j["C"] = cls(cause);
  j["E"] = cls(effect);
  j["macro_f1"] = macro_f1;
  j["sentences"] = sentences;
  j["tokens"] = confusion.total();
  j["confusion_labels"] = {"O", "C", "E"};
  j["confusion"] = confusion.counts;
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof(line), "%-6s %9s %9s %9s %8s\n", "class", "precision", "recall", "f1", "support");
  os << line;
  for (auto [name, m] : {std::pair{"C", &cause}, {"E", &effect}}) {
    std::snprintf(line, sizeof(line), "%-6s %9.4f %9.4f %9.4f %8zu%s\n", name, m->precision, m->recall, m->f1,
                  m->support, m->absent ? "  (absent)" : "");
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-6s %29.4f\n", "macro", macro_f1);
  os << line;
  return os.str();
}

}  // namespace tcgat
