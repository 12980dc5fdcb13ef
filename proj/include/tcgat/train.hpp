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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tcgat/checkpoint.hpp"
#include "tcgat/config.hpp"
#include "tcgat/metrics.hpp"
#include "tcgat/model.hpp"

namespace tcgat {

/// A trained labeler with everything evaluation needs.
struct Model {
  TrainConfig config;
  EmbeddingMode embedding_mode = EmbeddingMode::kLearned;
  std::size_t context_dim = 0;
  Vocabulary vocab;
  CausalKG kg;
  Network<float> net;
  /// Mean training loss per completed epoch.
  std::vector<double> loss_curve;

  [[nodiscard]] NamedTensors parameters() const;

  /// Writes the TCCKPT1 tensor container to `path` and configuration,
  /// vocabulary, KG and loss curve to `path` + ".meta.json".
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);
};

/// Adam with bias correction over a fixed parameter list.
class Adam {
 public:
  Adam(NamedParameters<float> params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Scales gradients so their global L2 norm is at most max_norm; returns the
  /// norm before clipping. Throws Error(kNumerical) on a non-finite norm.
  double clip_and_norm(double max_norm);
  void zero_grad();
  void step();
  [[nodiscard]] std::size_t steps() const { return t_; }

 private:
  NamedParameters<float> params_;
  double lr_, beta1_, beta2_, eps_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Trains a model on `train` only: the vocabulary and causal KG are built from
/// it. Deterministic for a fixed config.seed. Throws Error(kNumerical) with the
/// epoch and batch on a non-finite loss or gradient.
Model train(const TrainConfig& config, std::span<const AnnotatedSentence> train,
            const EmbeddingTable* embeddings = nullptr, const EpochCallback& on_epoch = {});

/// Argmax tag per token.
std::vector<CausalTag> predict(const Model& model, const AnnotatedSentence& sentence,
                               const EmbeddingTable* embeddings = nullptr);

/// Token-level P/R/F1 for C and E plus macro F1.
EvalReport evaluate(const Model& model, std::span<const AnnotatedSentence> test,
                    const EmbeddingTable* embeddings = nullptr);

struct AblationRow {
  Variant variant = Variant::kFull;
  EvalReport test;
  /// Restricted to temporally_ambiguous_subset(train, test).
  EvalReport ambiguous;
  std::vector<double> loss_curve;
};

struct AblationResult {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t ambiguous_size = 0;
  std::vector<AblationRow> rows;

  [[nodiscard]] const AblationRow& row(Variant v) const;
  [[nodiscard]] std::string to_table() const;
  [[nodiscard]] std::string to_json() const;
};

/// Splits `corpus` with config.train_fraction / config.seed, then trains and
/// evaluates each variant on the same split and seed.
AblationResult run_ablation(const TrainConfig& config, std::span<const AnnotatedSentence> corpus,
                            const EmbeddingTable* embeddings = nullptr,
                            std::span<const Variant> variants = kAllVariants);

}  // namespace tcgat
