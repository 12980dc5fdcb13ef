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

// Temporal-causal annotated sentences: JSONL parsing with validation and
// converse closure, serialization, statistics, a seeded synthetic generator,
// and train/test splitting.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tcgat {

/// Token-level causal label. The numeric value is the classifier's class index.
enum class CausalTag : std::uint8_t { kO = 0, kC = 1, kE = 2 };
inline constexpr std::size_t kNumClasses = 3;

/// Pairwise temporal relation of token i to token j.
enum class TemporalRel : std::uint8_t {
  kB,  // i before j
  kA,  // i after j
  kS,  // simultaneous
  kI,  // i includes j
  kN,  // i is included in j
};
inline constexpr std::size_t kNumTemporalRels = 5;

char tag_symbol(CausalTag tag);
CausalTag parse_tag(std::string_view symbol);
char rel_symbol(TemporalRel rel);
TemporalRel parse_rel(std::string_view symbol);
TemporalRel converse(TemporalRel rel);

struct TemporalRelation {
  std::size_t head = 0;
  std::size_t tail = 0;
  TemporalRel rel = TemporalRel::kB;

  auto operator<=>(const TemporalRelation&) const = default;
};

struct AnnotatedSentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<CausalTag> causal_tags;
  /// Sorted by (head, tail); converse-closed after normalize().
  std::vector<TemporalRelation> temporal;

  [[nodiscard]] std::size_t size() const { return tokens.size(); }
  bool operator==(const AnnotatedSentence&) const = default;
};

inline constexpr std::size_t kDefaultMaxLen = 50;

/// Validates the sentence and completes missing converse relations in place.
/// Throws Error(kValidation) on length mismatch, out-of-range or reflexive
/// indices, and contradictory relations for the same ordered pair.
void normalize(AnnotatedSentence& sentence);

/// Parses one JSONL record; `line_no` is used in error messages.
AnnotatedSentence parse_record(std::string_view line, std::size_t line_no);

/// Reads a JSONL corpus. Blank lines are skipped. All over-length sentences
/// are reported together in a single error listing their ids.
std::vector<AnnotatedSentence> parse_corpus(std::istream& in, std::size_t max_len = kDefaultMaxLen);
std::vector<AnnotatedSentence> parse_corpus(const std::filesystem::path& path,
                                            std::size_t max_len = kDefaultMaxLen);

std::string to_jsonl(const AnnotatedSentence& sentence);
void write_corpus(std::ostream& out, std::span<const AnnotatedSentence> sentences);
void write_corpus(const std::filesystem::path& path, std::span<const AnnotatedSentence> sentences);

enum class Split { kTrain, kTest };

struct CorpusStats {
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;
  std::map<CausalTag, std::size_t> tag_counts;
  /// Stored (converse-closed) ordered-pair relations.
  std::map<TemporalRel, std::size_t> relation_counts;
  std::optional<Split> split;

  CorpusStats& operator+=(const CorpusStats& other);
  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(std::span<const AnnotatedSentence> sentences,
                         std::optional<Split> split = std::nullopt);
/// Pretty-printed JSON object.
std::string stats_to_json(const CorpusStats& stats);

/// Word pools and mixing fractions for the synthetic generator.
struct SynthTemplates {
  struct CausePair {
    std::string cause;
    std::string effect;
  };
  std::vector<CausePair> pairs;
  std::vector<std::string> cause_modifiers;
  std::vector<std::string> effect_modifiers;
  std::vector<std::string> determiners;
  /// Verbs seen only in causal sentences.
  std::vector<std::string> causal_verbs;
  /// Verbs shared by causal and distractor sentences.
  std::vector<std::string> shared_verbs;
  /// Effect-first connectives ("resulted from"); may be multi-word.
  std::vector<std::string> reverse_verbs;
  std::vector<std::string> tails;
  std::vector<std::string> plain_sentences;

  double modifier_probability = 0.5;
  double determiner_probability = 0.3;
  double tail_probability = 0.3;
  double reverse_probability = 0.25;
  double shared_verb_probability = 0.5;
  /// Fraction of sentences with a temporal relation (S, I or N) and no causal tags.
  double distractor_fraction = 0.3;
  /// Fraction of sentences with neither relations nor causal tags.
  double plain_fraction = 0.1;

  static SynthTemplates defaults();
  /// Overrides defaults() with the keys present in a JSON object.
  static SynthTemplates from_json(std::string_view text);
  /// Throws Error(kValidation) describing the first problem found.
  void validate() const;
};

std::vector<AnnotatedSentence> generate_synthetic(std::size_t n, std::uint64_t seed,
                                                  const SynthTemplates& templates = SynthTemplates::defaults());

struct CorpusSplit {
  std::vector<AnnotatedSentence> train;
  std::vector<AnnotatedSentence> test;
};

/// Seeded shuffle then cut; train receives round(train_fraction * n).
CorpusSplit split_corpus(std::span<const AnnotatedSentence> sentences, double train_fraction,
                         std::uint64_t seed);

/// Test sentences carrying a temporal relation on a token whose lowercase form,
/// in the training split, is tagged C/E in one sentence and O while temporally
/// related in another. Surface context cannot separate causal from
/// non-causal uses of such tokens; only the relation types can.
std::vector<AnnotatedSentence> temporally_ambiguous_subset(std::span<const AnnotatedSentence> train,
                                                           std::span<const AnnotatedSentence> test);

std::string normalize_token(std::string_view token);

}  // namespace tcgat
