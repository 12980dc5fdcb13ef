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
#include "tcgat/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "tcgat/error.hpp"

namespace tcgat {

namespace {

constexpr const char* kMetaFormat = "tcgat-meta-1";

std::filesystem::path meta_path(const std::filesystem::path& ckpt) {
  auto p = ckpt;
  p += ".meta.json";
  return p;
}

void check_lengths(std::span<const AnnotatedSentence> sentences, std::size_t max_len) {
  for (const auto& s : sentences) {
    if (s.size() > max_len) {
      fail(ErrorKind::kValidation, "sentence \"" + s.id + "\" has " + std::to_string(s.size()) +
                                       " tokens, above max_len " + std::to_string(max_len));
    }
  }
}

}  // namespace

// -- Model ----------------------------------------------------------------------

NamedTensors Model::parameters() const { return net.named_parameters(); }

void Model::save(const std::filesystem::path& path) const {
  save_checkpoint(path, parameters());
  nlohmann::ordered_json meta;
  meta["format"] = kMetaFormat;
  meta["config"] = config.to_map();
  meta["embedding_mode"] = embedding_mode == EmbeddingMode::kLearned ? "learned" : "external";
  meta["context_dim"] = context_dim;
  meta["vocab"] = vocab.tokens();
  meta["kg"] = nlohmann::ordered_json::parse(kg.to_json());
  meta["loss_curve"] = loss_curve;
  std::ofstream out(meta_path(path));
  if (!out) fail(ErrorKind::kIo, "cannot write " + meta_path(path).string());
  out << meta.dump(2) << '\n';
}

Model Model::load(const std::filesystem::path& path) {
  const auto tensors = load_checkpoint(path);
  std::ifstream in(meta_path(path));
  if (!in) fail(ErrorKind::kIo, "cannot open " + meta_path(path).string());
  Model m;
  try {
    const auto meta = nlohmann::json::parse(in);
    if (meta.at("format").get<std::string>() != kMetaFormat) {
      fail(ErrorKind::kIo, "unsupported model metadata format");
    }
    for (const auto& [key, value] : meta.at("config").items()) m.config.set(key, value.get<std::string>());
    m.config.validate();
    m.embedding_mode =
        meta.at("embedding_mode").get<std::string>() == "learned" ? EmbeddingMode::kLearned : EmbeddingMode::kExternal;
    m.context_dim = meta.at("context_dim").get<std::size_t>();
    m.vocab = Vocabulary::from_tokens(meta.at("vocab").get<std::vector<std::string>>());
    m.kg = CausalKG::from_json(meta.at("kg").dump());
    m.loss_curve = meta.at("loss_curve").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, meta_path(path).string() + ": malformed metadata: " + e.what());
  }
  m.net = Network<float>::init(m.config, m.vocab.size(), m.embedding_mode, m.context_dim, m.config.seed);
  std::map<std::string, Tensor> by_name(tensors.begin(), tensors.end());
  for (auto& [name, param] : m.net.named_parameters()) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) fail(ErrorKind::kIo, path.string() + ": missing tensor \"" + name + "\"");
    if (it->second.shape() != param.shape()) {
      fail(ErrorKind::kIo, path.string() + ": tensor \"" + name + "\" has shape " +
                               shape_string(it->second.shape()) + ", expected " + shape_string(param.shape()));
    }
    auto dst = param.mutable_data();
    std::copy(it->second.data().begin(), it->second.data().end(), dst.begin());
    by_name.erase(it);
  }
  if (!by_name.empty()) fail(ErrorKind::kIo, path.string() + ": unexpected tensor \"" + by_name.begin()->first + "\"");
  return m;
}

// -- Adam -----------------------------------------------------------------------

Adam::Adam(NamedParameters<float> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& [name, p] : params_) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

void Adam::zero_grad() {
  for (auto& [name, p] : params_) p.zero_grad();
}

double Adam::clip_and_norm(double max_norm) {
  double sq = 0.0;
  for (const auto& [name, p] : params_) {
    for (float g : p.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) fail(ErrorKind::kNumerical, "non-finite gradient norm");
  if (max_norm > 0.0 && norm > max_norm) {
    const auto factor = static_cast<float>(max_norm / norm);
    for (auto& [name, p] : params_) {
      for (auto& g : p.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i].second;
    if (!p.has_grad()) continue;
    const auto g = p.grad();
    auto x = p.mutable_data();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double gk = g[k];
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * gk;
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * gk * gk;
      const double update = lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
      x[k] = static_cast<float>(static_cast<double>(x[k]) - update);
    }
  }
}

// -- training ---------------------------------------------------------------------

Model train(const TrainConfig& config, std::span<const AnnotatedSentence> corpus, const EmbeddingTable* embeddings,
            const EpochCallback& on_epoch) {
  config.validate();
  if (corpus.empty()) fail(ErrorKind::kValidation, "training corpus is empty");
  check_lengths(corpus, config.max_len);

  Model model;
  model.config = config;
  model.embedding_mode = embeddings ? EmbeddingMode::kExternal : EmbeddingMode::kLearned;
  model.context_dim = embeddings ? embeddings->dim() : config.embed_dim;
  model.kg = build_causal_kg(corpus);
  model.vocab = embeddings ? Vocabulary() : Vocabulary::build(corpus);
  if (embeddings) {
    for (const auto& s : corpus) {
      const auto& e = embeddings->at(s.id);
      if (e.tokens != s.size()) {
        fail(ErrorKind::kValidation, "sentence \"" + s.id + "\": token/vector count mismatch (" +
                                         std::to_string(s.size()) + " tokens, " + std::to_string(e.tokens) +
                                         " vectors)");
      }
    }
  }
  model.net = Network<float>::init(config, model.vocab.size(), model.embedding_mode, model.context_dim, config.seed);

  std::vector<SentenceInputs> inputs;
  inputs.reserve(corpus.size());
  for (const auto& s : corpus) inputs.push_back(prepare_inputs(s, model.kg, model.vocab));

  Adam adam(model.net.named_parameters(), config.lr);
  const CounterRng root(config.seed);
  std::vector<std::size_t> order(corpus.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    const auto shuffle = root.derive({0x5f, epoch});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i, i)]);

    double epoch_loss = 0.0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += config.batch_size, ++batch) {
      const auto end = std::min(order.size(), start + config.batch_size);
      const auto weight = 1.0f / static_cast<float>(end - start);
      try {
        adam.zero_grad();
        for (std::size_t k = start; k < end; ++k) {
          const auto idx = order[k];
          const DropoutContext drop{true, root.derive({0xd0, epoch, idx})};
          const auto trace = forward(model.net, config, inputs[idx], embeddings, drop);
          const auto loss = token_loss(trace.probs, std::span<const CausalTag>(corpus[idx].causal_tags));
          const double value = loss.item();
          if (!std::isfinite(value)) fail(ErrorKind::kNumerical, "non-finite loss");
          epoch_loss += value;
          scale(loss, weight).backward();
        }
        adam.clip_and_norm(config.clip_norm);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumerical) throw;
        fail(ErrorKind::kNumerical,
             "epoch " + std::to_string(epoch) + " batch " + std::to_string(batch) + ": " + e.what());
      }
      adam.step();
    }
    const double mean_loss = epoch_loss / static_cast<double>(corpus.size());
    model.loss_curve.push_back(mean_loss);
    if (on_epoch) on_epoch(epoch, mean_loss);

    if (mean_loss < best * (1.0 - config.plateau_tolerance)) {
      best = mean_loss;
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      break;
    }
  }
  return model;
}

std::vector<CausalTag> predict(const Model& model, const AnnotatedSentence& s, const EmbeddingTable* embeddings) {
  if (model.embedding_mode == EmbeddingMode::kExternal && embeddings == nullptr) {
    fail(ErrorKind::kValidation, "model was trained on external embeddings; an embedding file is required");
  }
  const auto in = prepare_inputs(s, model.kg, model.vocab);
  const auto trace = forward(model.net, model.config, in, embeddings);
  std::vector<CausalTag> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (trace.probs.at(i, c) > trace.probs.at(i, best)) best = c;
    }
    out[i] = static_cast<CausalTag>(best);
  }
  return out;
}

EvalReport evaluate(const Model& model, std::span<const AnnotatedSentence> test, const EmbeddingTable* embeddings) {
  check_lengths(test, model.config.max_len);
  Confusion confusion;
  for (const auto& s : test) {
    const auto predicted = predict(model, s, embeddings);
    confusion.add(std::span<const CausalTag>(s.causal_tags), std::span<const CausalTag>(predicted));
  }
  return EvalReport::from_confusion(confusion, test.size());
}

// -- ablation ---------------------------------------------------------------------

const AblationRow& AblationResult::row(Variant v) const {
  const auto it = std::find_if(rows.begin(), rows.end(), [v](const AblationRow& r) { return r.variant == v; });
  if (it == rows.end()) fail(ErrorKind::kArgument, "ablation has no row for " + std::string(variant_name(v)));
  return *it;
}

std::string AblationResult::to_table() const {
  std::ostringstream os;
  char line[192];
  std::snprintf(line, sizeof(line), "%-15s %7s %7s %7s %7s %7s %7s %9s %11s\n", "variant", "C-P", "C-R", "C-F1", "E-P",
                "E-R", "E-F1", "Macro-F1", "Ambig-F1");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-15s %7.4f %7.4f %7.4f %7.4f %7.4f %7.4f %9.4f %11.4f\n",
                  std::string(variant_name(r.variant)).c_str(), r.test.cause.precision, r.test.cause.recall,
                  r.test.cause.f1, r.test.effect.precision, r.test.effect.recall, r.test.effect.f1, r.test.macro_f1,
                  r.ambiguous.macro_f1);
    os << line;
  }
  os << "train " << train_size << ", test " << test_size << ", temporally ambiguous test " << ambiguous_size << '\n';
  return os.str();
}

std::string AblationResult::to_json() const {
  nlohmann::ordered_json j;
  j["train_size"] = train_size;
  j["test_size"] = test_size;
  j["ambiguous_size"] = ambiguous_size;
  auto variants = nlohmann::ordered_json::object();
  for (const auto& r : rows) {
    nlohmann::ordered_json v;
    v["test"] = nlohmann::ordered_json::parse(r.test.to_json());
    v["ambiguous"] = nlohmann::ordered_json::parse(r.ambiguous.to_json());
    v["loss_curve"] = r.loss_curve;
    variants[std::string(variant_name(r.variant))] = std::move(v);
  }
  j["variants"] = std::move(variants);
  return j.dump(2);
}

AblationResult run_ablation(const TrainConfig& config, std::span<const AnnotatedSentence> corpus,
                            const EmbeddingTable* embeddings, std::span<const Variant> variants) {
  config.validate();
  const auto split = split_corpus(corpus, config.train_fraction, config.seed);
  if (split.train.empty() || split.test.empty()) fail(ErrorKind::kValidation, "corpus too small to split");
  const auto ambiguous = temporally_ambiguous_subset(split.train, split.test);
  AblationResult result;
  result.train_size = split.train.size();
  result.test_size = split.test.size();
  result.ambiguous_size = ambiguous.size();
  for (auto v : variants) {
    auto cfg = config;
    cfg.variant = v;
    const auto model = train(cfg, split.train, embeddings);
    result.rows.push_back({v, evaluate(model, split.test, embeddings), evaluate(model, ambiguous, embeddings),
                           model.loss_curve});
  }
  return result;
}

}  // namespace tcgat
