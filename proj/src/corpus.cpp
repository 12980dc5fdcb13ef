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
#include "tcgat/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tcgat/error.hpp"
#include "tcgat/rng.hpp"

namespace tcgat {

using json = nlohmann::json;

char tag_symbol(CausalTag tag) {
  switch (tag) {
    case CausalTag::kO: return 'O';
    case CausalTag::kC: return 'C';
    case CausalTag::kE: return 'E';
  }
  return '?';
}

CausalTag parse_tag(std::string_view symbol) {
  if (symbol == "O") return CausalTag::kO;
  if (symbol == "C") return CausalTag::kC;
  if (symbol == "E") return CausalTag::kE;
  fail(ErrorKind::kValidation, "unknown causal tag \"" + std::string(symbol) + "\"");
}

char rel_symbol(TemporalRel rel) {
  constexpr char kSymbols[] = {'B', 'A', 'S', 'I', 'N'};
  return kSymbols[static_cast<std::size_t>(rel)];
}

TemporalRel parse_rel(std::string_view symbol) {
  if (symbol == "B") return TemporalRel::kB;
  if (symbol == "A") return TemporalRel::kA;
  if (symbol == "S") return TemporalRel::kS;
  if (symbol == "I") return TemporalRel::kI;
  if (symbol == "N") return TemporalRel::kN;
  fail(ErrorKind::kValidation, "unknown temporal relation \"" + std::string(symbol) + "\"");
}

TemporalRel converse(TemporalRel rel) {
  switch (rel) {
    case TemporalRel::kB: return TemporalRel::kA;
    case TemporalRel::kA: return TemporalRel::kB;
    case TemporalRel::kS: return TemporalRel::kS;
    case TemporalRel::kI: return TemporalRel::kN;
    case TemporalRel::kN: return TemporalRel::kI;
  }
  return rel;
}

std::string normalize_token(std::string_view token) {
  std::string out(token);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void normalize(AnnotatedSentence& s) {
  const auto where = [&] { return "sentence \"" + s.id + "\": "; };
  if (s.tokens.empty()) fail(ErrorKind::kValidation, where() + "no tokens");
  if (s.causal_tags.size() != s.tokens.size()) {
    fail(ErrorKind::kValidation, where() + std::to_string(s.causal_tags.size()) + " causal tags for " +
                                     std::to_string(s.tokens.size()) + " tokens");
  }
  const auto n = s.tokens.size();
  std::map<std::pair<std::size_t, std::size_t>, TemporalRel> pairs;
  const auto insert = [&](std::size_t i, std::size_t j, TemporalRel rel) {
    auto [it, fresh] = pairs.emplace(std::pair{i, j}, rel);
    if (!fresh && it->second != rel) {
      fail(ErrorKind::kValidation, where() + "contradictory relations for pair (" + std::to_string(i) + ", " +
                                       std::to_string(j) + "): " + rel_symbol(it->second) + " vs " +
                                       rel_symbol(rel));
    }
  };
  for (const auto& r : s.temporal) {
    if (r.head >= n || r.tail >= n) {
      fail(ErrorKind::kValidation, where() + "relation index (" + std::to_string(r.head) + ", " +
                                       std::to_string(r.tail) + ") out of range for " + std::to_string(n) +
                                       " tokens");
    }
    if (r.head == r.tail) {
      fail(ErrorKind::kValidation, where() + "reflexive relation on token " + std::to_string(r.head));
    }
  }
  for (const auto& r : s.temporal) insert(r.head, r.tail, r.rel);
  for (const auto& r : s.temporal) insert(r.tail, r.head, converse(r.rel));
  s.temporal.clear();
  for (const auto& [key, rel] : pairs) s.temporal.push_back({key.first, key.second, rel});
}

AnnotatedSentence parse_record(std::string_view line, std::size_t line_no) {
  const auto at = "line " + std::to_string(line_no) + ": ";
  AnnotatedSentence s;
  try {
    const auto j = json::parse(line);
    if (!j.is_object()) fail(ErrorKind::kValidation, at + "record is not a JSON object");
    for (const char* key : {"id", "tokens", "causal_tags"}) {
      if (!j.contains(key)) fail(ErrorKind::kValidation, at + "missing field \"" + key + "\"");
    }
    s.id = j.at("id").get<std::string>();
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto& t : j.at("causal_tags")) s.causal_tags.push_back(parse_tag(t.get<std::string>()));
    if (j.contains("temporal")) {
      for (const auto& r : j.at("temporal")) {
        if (!r.is_array() || r.size() != 3) {
          fail(ErrorKind::kValidation, at + "temporal entries must be [i, j, rel]");
        }
        const auto i = r.at(0).get<std::int64_t>();
        const auto k = r.at(1).get<std::int64_t>();
        if (i < 0 || k < 0) fail(ErrorKind::kValidation, at + "negative relation index");
        s.temporal.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(k),
                              parse_rel(r.at(2).get<std::string>())});
      }
    }
    normalize(s);
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, at + "malformed record: " + e.what());
  } catch (const Error& e) {
    const std::string msg = e.what();
    fail(e.kind(), msg.rfind("line ", 0) == 0 ? msg : at + msg);
  }
  return s;
}

std::vector<AnnotatedSentence> parse_corpus(std::istream& in, std::size_t max_len) {
  std::vector<AnnotatedSentence> out;
  std::vector<std::string> too_long;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    auto s = parse_record(line, line_no);
    if (!ids.insert(s.id).second) {
      fail(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": duplicate sentence id \"" + s.id + "\"");
    }
    if (s.size() > max_len) too_long.push_back(s.id);
    out.push_back(std::move(s));
  }
  if (!too_long.empty()) {
    std::string msg = std::to_string(too_long.size()) + " sentence(s) longer than max_len " +
                      std::to_string(max_len) + ":";
    for (const auto& id : too_long) msg += " " + id;
    fail(ErrorKind::kValidation, msg);
  }
  return out;
}

std::vector<AnnotatedSentence> parse_corpus(const std::filesystem::path& path, std::size_t max_len) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open corpus " + path.string());
  try {
    return parse_corpus(in, max_len);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string to_jsonl(const AnnotatedSentence& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["tokens"] = s.tokens;
  auto tags = nlohmann::ordered_json::array();
  for (auto t : s.causal_tags) tags.push_back(std::string(1, tag_symbol(t)));
  j["causal_tags"] = std::move(tags);
  auto rels = nlohmann::ordered_json::array();
  for (const auto& r : s.temporal) rels.push_back({r.head, r.tail, std::string(1, rel_symbol(r.rel))});
  j["temporal"] = std::move(rels);
  return j.dump();
}

void write_corpus(std::ostream& out, std::span<const AnnotatedSentence> sentences) {
  for (const auto& s : sentences) out << to_jsonl(s) << '\n';
}

void write_corpus(const std::filesystem::path& path, std::span<const AnnotatedSentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write corpus " + path.string());
  write_corpus(out, sentences);
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

// -- statistics ------------------------------------------------------------------

CorpusStats& CorpusStats::operator+=(const CorpusStats& other) {
  sentence_count += other.sentence_count;
  token_count += other.token_count;
  for (const auto& [tag, n] : other.tag_counts) tag_counts[tag] += n;
  for (const auto& [rel, n] : other.relation_counts) relation_counts[rel] += n;
  if (split != other.split) split.reset();
  return *this;
}

CorpusStats corpus_stats(std::span<const AnnotatedSentence> sentences, std::optional<Split> split) {
  CorpusStats stats;
  stats.split = split;
  for (auto tag : {CausalTag::kO, CausalTag::kC, CausalTag::kE}) stats.tag_counts[tag] = 0;
  for (std::size_t r = 0; r < kNumTemporalRels; ++r) stats.relation_counts[static_cast<TemporalRel>(r)] = 0;
  for (const auto& s : sentences) {
    ++stats.sentence_count;
    stats.token_count += s.size();
    for (auto tag : s.causal_tags) ++stats.tag_counts[tag];
    for (const auto& r : s.temporal) ++stats.relation_counts[r.rel];
  }
  return stats;
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["sentence_count"] = stats.sentence_count;
  j["token_count"] = stats.token_count;
  nlohmann::ordered_json tags, rels;
  for (const auto& [tag, n] : stats.tag_counts) tags[std::string(1, tag_symbol(tag))] = n;
  for (const auto& [rel, n] : stats.relation_counts) rels[std::string(1, rel_symbol(rel))] = n;
  j["tag_counts"] = tags;
  j["relation_counts"] = rels;
  if (stats.split) j["split"] = *stats.split == Split::kTrain ? "train" : "test";
  return j.dump(2);
}

// -- synthetic generation ---------------------------------------------------------

SynthTemplates SynthTemplates::defaults() {
  SynthTemplates t;
  t.pairs = {{"rain", "floods"},      {"smoking", "cancer"},     {"earthquake", "tsunami"},
             {"drought", "famine"},   {"virus", "fever"},        {"storm", "outage"},
             {"fire", "smoke"},       {"stress", "insomnia"},    {"pollution", "asthma"},
             {"war", "migration"},    {"inflation", "protests"}, {"overheating", "failure"}};
  t.cause_modifiers = {"heavy", "sudden", "prolonged", "massive", "chronic", "intense"};
  t.effect_modifiers = {"severe", "widespread", "serious", "major", "lasting"};
  t.determiners = {"the", "a"};
  t.causal_verbs = {"caused", "triggered", "produced", "induced"};
  t.shared_verbs = {"accompanied", "involved", "brought", "meant"};
  t.reverse_verbs = {"resulted from", "followed", "came after"};
  t.tails = {"last year", "in the region", "across the valley", "over the weekend"};
  t.plain_sentences = {"the committee discussed the annual budget", "officials reviewed the new guidelines",
                       "researchers published the results on monday", "the team announced a new schedule",
                       "local residents attended the public meeting"};
  return t;
}

SynthTemplates SynthTemplates::from_json(std::string_view text) {
  auto t = defaults();
  try {
    const auto j = json::parse(text);
    if (!j.is_object()) fail(ErrorKind::kValidation, "template config must be a JSON object");
    if (j.contains("pairs")) {
      t.pairs.clear();
      for (const auto& p : j.at("pairs")) t.pairs.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
    }
    const auto list = [&](const char* key, std::vector<std::string>& dst) {
      if (j.contains(key)) dst = j.at(key).get<std::vector<std::string>>();
    };
    list("cause_modifiers", t.cause_modifiers);
    list("effect_modifiers", t.effect_modifiers);
    list("determiners", t.determiners);
    list("causal_verbs", t.causal_verbs);
    list("shared_verbs", t.shared_verbs);
    list("reverse_verbs", t.reverse_verbs);
    list("tails", t.tails);
    list("plain_sentences", t.plain_sentences);
    const auto num = [&](const char* key, double& dst) {
      if (j.contains(key)) dst = j.at(key).get<double>();
    };
    num("modifier_probability", t.modifier_probability);
    num("determiner_probability", t.determiner_probability);
    num("tail_probability", t.tail_probability);
    num("reverse_probability", t.reverse_probability);
    num("shared_verb_probability", t.shared_verb_probability);
    num("distractor_fraction", t.distractor_fraction);
    num("plain_fraction", t.plain_fraction);
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("invalid template config: ") + e.what());
  }
  t.validate();
  return t;
}

namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

bool is_single_word(const std::string& w) {
  return !w.empty() && std::none_of(w.begin(), w.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

void SynthTemplates::validate() const {
  const auto bad = [](const std::string& why) { fail(ErrorKind::kValidation, "invalid template config: " + why); };
  for (auto [name, p] : {std::pair{"modifier_probability", modifier_probability},
                         {"determiner_probability", determiner_probability},
                         {"tail_probability", tail_probability},
                         {"reverse_probability", reverse_probability},
                         {"shared_verb_probability", shared_verb_probability},
                         {"distractor_fraction", distractor_fraction},
                         {"plain_fraction", plain_fraction}}) {
    if (!(p >= 0.0 && p <= 1.0)) bad(std::string(name) + " must lie in [0, 1]");
  }
  if (distractor_fraction + plain_fraction > 1.0 + 1e-12) bad("distractor_fraction + plain_fraction exceeds 1");
  const bool wants_causal = distractor_fraction + plain_fraction < 1.0;
  if ((wants_causal || distractor_fraction > 0.0) && pairs.empty()) bad("no cause/effect pairs");
  for (const auto& p : pairs) {
    if (!is_single_word(p.cause) || !is_single_word(p.effect)) bad("pair members must be single words");
    if (normalize_token(p.cause) == normalize_token(p.effect)) bad("pair \"" + p.cause + "\" maps onto itself");
  }
  for (const auto* pool : {&cause_modifiers, &effect_modifiers, &determiners, &causal_verbs, &shared_verbs}) {
    for (const auto& w : *pool) {
      if (!is_single_word(w)) bad("\"" + w + "\" is not a single word");
    }
  }
  for (const auto* pool : {&reverse_verbs, &tails, &plain_sentences}) {
    for (const auto& w : *pool) {
      if (split_words(w).empty()) bad("empty phrase");
    }
  }
  if (wants_causal && causal_verbs.empty() && shared_verbs.empty()) bad("causal sentences need a verb pool");
  if (distractor_fraction > 0.0 && shared_verbs.empty()) bad("distractor sentences need shared_verbs");
  if (plain_fraction > 0.0 && plain_sentences.empty()) bad("plain_fraction > 0 but no plain_sentences");
  if (reverse_probability > 0.0 && reverse_verbs.empty() && wants_causal) {
    bad("reverse_probability > 0 but no reverse_verbs");
  }
}

namespace {

// Draws from one sentence's private stream; each call consumes one counter.
class Draw {
 public:
  explicit Draw(CounterRng rng) : rng_(rng) {}
  bool chance(double p) { return rng_.uniform(counter_++) < p; }
  double unit() { return rng_.uniform(counter_++); }
  template <typename C>
  const auto& pick(const C& pool) {
    return pool[rng_.below(counter_++, std::size(pool))];
  }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

struct Builder {
  AnnotatedSentence s;

  std::size_t push(const std::string& w, CausalTag tag = CausalTag::kO) {
    s.tokens.push_back(w);
    s.causal_tags.push_back(tag);
    return s.tokens.size() - 1;
  }
  void push_phrase(std::string_view phrase) {
    for (auto& w : split_words(phrase)) push(w);
  }
};

// [det] [modifier] noun
std::size_t noun_phrase(Builder& b, Draw& d, const SynthTemplates& t, const std::string& noun,
                        const std::vector<std::string>& modifiers, CausalTag tag) {
  if (!t.determiners.empty() && d.chance(t.determiner_probability)) b.push(d.pick(t.determiners));
  if (!modifiers.empty() && d.chance(t.modifier_probability)) b.push(d.pick(modifiers));
  return b.push(noun, tag);
}

}  // namespace

std::vector<AnnotatedSentence> generate_synthetic(std::size_t n, std::uint64_t seed, const SynthTemplates& t) {
  if (n == 0) fail(ErrorKind::kValidation, "generate_synthetic: n must be >= 1");
  t.validate();
  const CounterRng root(seed);
  std::vector<AnnotatedSentence> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Draw d(root.derive({k}));
    Builder b;
    std::ostringstream id;
    id << "syn-" << std::setw(6) << std::setfill('0') << k;
    b.s.id = id.str();

    const double kind = d.unit();
    if (kind < t.distractor_fraction) {
      // Same nouns and shared verbs as causal sentences; only the relation type differs.
      const auto& pair = d.pick(t.pairs);
      const auto i = noun_phrase(b, d, t, pair.cause, t.cause_modifiers, CausalTag::kO);
      b.push(d.pick(t.shared_verbs));
      const auto j = noun_phrase(b, d, t, pair.effect, t.effect_modifiers, CausalTag::kO);
      constexpr TemporalRel kDistractorRels[] = {TemporalRel::kS, TemporalRel::kI, TemporalRel::kN};
      b.s.temporal.push_back(TemporalRelation{i, j, d.pick(kDistractorRels)});
    } else if (kind < t.distractor_fraction + t.plain_fraction) {
      b.push_phrase(d.pick(t.plain_sentences));
    } else {
      const auto& pair = d.pick(t.pairs);
      std::size_t cause = 0, effect = 0;
      if (!t.reverse_verbs.empty() && d.chance(t.reverse_probability)) {
        effect = noun_phrase(b, d, t, pair.effect, t.effect_modifiers, CausalTag::kE);
        b.push_phrase(d.pick(t.reverse_verbs));
        cause = noun_phrase(b, d, t, pair.cause, t.cause_modifiers, CausalTag::kC);
      } else {
        cause = noun_phrase(b, d, t, pair.cause, t.cause_modifiers, CausalTag::kC);
        const bool shared = t.causal_verbs.empty() || (!t.shared_verbs.empty() && d.chance(t.shared_verb_probability));
        b.push(shared ? d.pick(t.shared_verbs) : d.pick(t.causal_verbs));
        effect = noun_phrase(b, d, t, pair.effect, t.effect_modifiers, CausalTag::kE);
      }
      // Causes precede their effects.
      b.s.temporal.push_back({cause, effect, TemporalRel::kB});
    }
    if (!t.tails.empty() && d.chance(t.tail_probability)) b.push_phrase(d.pick(t.tails));
    normalize(b.s);
    out.push_back(std::move(b.s));
  }
  return out;
}

CorpusSplit split_corpus(std::span<const AnnotatedSentence> sentences, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    fail(ErrorKind::kValidation, "train_fraction must lie in [0, 1]");
  }
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  const CounterRng rng = CounterRng(seed).derive({0x5e11});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i, i)]);
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(sentences.size())));
  CorpusSplit split;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < cut ? split.train : split.test).push_back(sentences[order[k]]);
  }
  return split;
}

std::vector<AnnotatedSentence> temporally_ambiguous_subset(std::span<const AnnotatedSentence> train,
                                                           std::span<const AnnotatedSentence> test) {
  const auto related = [](const AnnotatedSentence& s) {
    std::vector<bool> in(s.size(), false);
    for (const auto& r : s.temporal) in[r.head] = in[r.tail] = true;
    return in;
  };
  std::set<std::string> causal, related_plain;
  for (const auto& s : train) {
    const auto in = related(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto w = normalize_token(s.tokens[i]);
      if (s.causal_tags[i] != CausalTag::kO) causal.insert(w);
      else if (in[i]) related_plain.insert(w);
    }
  }
  std::vector<AnnotatedSentence> out;
  for (const auto& s : test) {
    const auto in = related(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto w = normalize_token(s.tokens[i]);
      if (in[i] && causal.contains(w) && related_plain.contains(w)) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

}  // namespace tcgat
