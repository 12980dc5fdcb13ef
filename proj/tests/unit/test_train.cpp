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
#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "tcgat/error.hpp"
#include "tcgat/train.hpp"

using namespace tcgat;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.embed_dim = 16;
  c.bilstm_hidden = 8;
  c.tgat_dim = 6;
  c.tgat_heads = 2;
  c.cgat_dim = 6;
  c.cgat_heads = 2;
  c.fuse_dim = 12;
  c.batch_size = 8;
  c.epochs = 4;
  c.lr = 5e-3;
  return c;
}

std::vector<float> flatten(const Model& m) {
  std::vector<float> out;
  for (const auto& [name, t] : m.net.named_parameters()) out.insert(out.end(), t.data().begin(), t.data().end());
  return out;
}

ForwardTrace<float> trace_for(Variant v, const AnnotatedSentence& s) {
  auto cfg = small_config();
  cfg.variant = v;
  const auto vocab = Vocabulary::build(std::span<const AnnotatedSentence>(&s, 1));
  const auto kg = build_causal_kg(std::span<const AnnotatedSentence>(&s, 1));
  const auto net = Network<float>::init(cfg, vocab.size(), EmbeddingMode::kLearned, 0, 3);
  return forward(net, cfg, prepare_inputs(s, kg, vocab), nullptr);
}

EmbeddingTable random_embeddings(std::span<const AnnotatedSentence> corpus, std::size_t dim) {
  EmbeddingTable t(dim);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& s = corpus[k];
    const CounterRng rng(77, k);
    std::vector<float> v(s.size() * dim);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(rng.uniform(i, -1, 1));
    t.add(s.id, s.size(), std::move(v));
  }
  return t;
}

}  // namespace

TEST_CASE("lr = 0 leaves parameters bit-identical") {
  auto cfg = small_config();
  cfg.lr = 0.0;
  cfg.epochs = 2;
  const auto corpus = generate_synthetic(20, 1);
  const auto trained = train(cfg, corpus);
  const auto vocab = Vocabulary::build(corpus);
  Model fresh;
  fresh.net = Network<float>::init(cfg, vocab.size(), EmbeddingMode::kLearned, cfg.embed_dim, cfg.seed);
  CHECK(flatten(trained) == flatten(fresh));
}

TEST_CASE("seeded runs are identical") {
  const auto corpus = generate_synthetic(40, 2);
  const auto split = split_corpus(corpus, 2.0 / 3.0, 1);
  const auto a = train(small_config(), split.train);
  const auto b = train(small_config(), split.train);
  CHECK(a.loss_curve == b.loss_curve);
  CHECK(flatten(a) == flatten(b));
  CHECK(evaluate(a, split.test) == evaluate(b, split.test));
  auto other = small_config();
  other.seed = 2;
  CHECK(train(other, split.train).loss_curve != a.loss_curve);
}

TEST_CASE("early stop on a flat loss") {
  auto cfg = small_config();
  cfg.lr = 0.0;
  cfg.tgat_dropout = 0.0;
  cfg.cgat_dropout = 0.0;
  cfg.epochs = 20;
  cfg.patience = 2;
  const auto m = train(cfg, generate_synthetic(10, 1));
  CHECK(m.loss_curve.size() == 3);
}

TEST_CASE("loss decreases on a small corpus") {
  auto cfg = small_config();
  cfg.epochs = 15;
  const auto m = train(cfg, generate_synthetic(30, 4));
  CHECK(m.loss_curve.back() < 0.5 * m.loss_curve.front());
}

TEST_CASE("variant structure") {
  const auto s = test::rain_floods();
  SUBCASE("tgat-only zeroes the C-GAT slice") {
    const auto t = trace_for(Variant::kTGATOnly, s);
    const auto tg = t.tgat.cols();
    bool tgat_nonzero = false;
    for (std::size_t i = 0; i < t.tc_input.rows(); ++i) {
      for (std::size_t c = 0; c < t.tc_input.cols(); ++c) {
        if (c >= tg) CHECK(t.tc_input.at(i, c) == 0.0f);
        else tgat_nonzero = tgat_nonzero || t.tc_input.at(i, c) != 0.0f;
      }
    }
    CHECK(tgat_nonzero);
  }
  SUBCASE("cgat-only zeroes the T-GAT slice") {
    const auto t = trace_for(Variant::kCGATOnly, s);
    for (std::size_t i = 0; i < t.tc_input.rows(); ++i) {
      for (std::size_t c = 0; c < t.tgat.cols(); ++c) CHECK(t.tc_input.at(i, c) == 0.0f);
    }
  }
  SUBCASE("no-equilibrium sums the projected branches") {
    const auto t = trace_for(Variant::kNoEquilibrium, s);
    CHECK_FALSE(t.gate.defined());
    for (std::size_t k = 0; k < t.fused.numel(); ++k) {
      CHECK(t.fused.data()[k] == doctest::Approx(t.h_tc.data()[k] + t.h_ctx.data()[k]).epsilon(1e-6));
    }
  }
  SUBCASE("no-context keeps only the graph branch") {
    const auto t = trace_for(Variant::kNoContext, s);
    for (std::size_t k = 0; k < t.fused.numel(); ++k) CHECK(t.fused.data()[k] == t.h_tc.data()[k]);
  }
  SUBCASE("context-only keeps only the context branch") {
    const auto t = trace_for(Variant::kContextOnly, s);
    CHECK_FALSE(t.tgat.defined());
    for (std::size_t k = 0; k < t.fused.numel(); ++k) CHECK(t.fused.data()[k] == t.h_ctx.data()[k]);
  }
  SUBCASE("full mixes through the gate") {
    const auto t = trace_for(Variant::kFull, s);
    REQUIRE(t.gate.defined());
    for (float g : t.gate.data()) {
      CHECK(g > 0.0f);
      CHECK(g < 1.0f);
    }
    CHECK(t.probs.cols() == 3);
  }
}

TEST_CASE("checkpoint save and load reproduce predictions") {
  const auto corpus = generate_synthetic(20, 5);
  const auto m = train(small_config(), corpus);
  const auto path = std::filesystem::temp_directory_path() / "tcgat_model_test.ckpt";
  m.save(path);
  const auto back = Model::load(path);
  CHECK(back.loss_curve == m.loss_curve);
  CHECK(back.kg == m.kg);
  CHECK(back.config.to_map() == m.config.to_map());
  CHECK(flatten(back) == flatten(m));
  CHECK(evaluate(back, corpus) == evaluate(m, corpus));
  std::filesystem::remove(path.string() + ".meta.json");
  CHECK_THROWS_AS(Model::load(path), Error);
  std::filesystem::remove(path);
}

TEST_CASE("external embeddings") {
  const auto corpus = generate_synthetic(20, 6);
  const auto table = random_embeddings(corpus, 24);
  const auto m = train(small_config(), corpus, &table);
  CHECK(m.embedding_mode == EmbeddingMode::kExternal);
  CHECK(m.context_dim == 24);
  CHECK(evaluate(m, corpus, &table).sentences == 20);
  CHECK_THROWS_AS(evaluate(m, corpus), Error);
  EmbeddingTable partial(24);
  partial.add(corpus[0].id, corpus[0].size(), table.at(corpus[0].id).values);
  CHECK_THROWS_AS(train(small_config(), corpus, &partial), Error);
}

TEST_CASE("divergence is reported as a numerical failure with its location") {
  auto cfg = small_config();
  cfg.lr = 1e35;
  cfg.epochs = 3;
  try {
    (void)train(cfg, generate_synthetic(16, 7));
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(train(small_config(), {}), Error);
  auto cfg = small_config();
  cfg.max_len = 3;
  CHECK_THROWS_AS(train(cfg, generate_synthetic(10, 1)), Error);
}

TEST_CASE("ablation covers every variant") {
  auto cfg = small_config();
  cfg.epochs = 2;
  const auto r = run_ablation(cfg, generate_synthetic(45, 8));
  CHECK(r.rows.size() == kAllVariants.size());
  CHECK(r.train_size == 30);
  CHECK(r.test_size == 15);
  for (auto v : kAllVariants) CHECK(r.row(v).variant == v);
  CHECK(r.to_table().find("context-only") != std::string::npos);
  CHECK(r.to_json().find("\"no-equilibrium\"") != std::string::npos);
}

TEST_CASE("overfit fixture: loss is monotone after epoch 20 up to 5% transient upticks") {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.patience = 0;
  cfg.batch_size = 10;
  // Dropout makes the per-epoch loss a noisy sample; check the deterministic objective.
  cfg.tgat_dropout = 0.0;
  cfg.cgat_dropout = 0.0;
  const auto m = train(cfg, generate_synthetic(10, 3));
  REQUIRE(m.loss_curve.size() == 200);
  CHECK(m.loss_curve.back() < 0.01);
  for (std::size_t e = 21; e < m.loss_curve.size(); ++e) {
    CHECK(m.loss_curve[e] <= 1.05 * m.loss_curve[e - 1]);
  }
}

TEST_CASE("overfit fixture with default dropout still memorizes") {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.patience = 0;
  cfg.batch_size = 10;
  const auto m = train(cfg, generate_synthetic(10, 3));
  CHECK(*std::min_element(m.loss_curve.begin(), m.loss_curve.end()) < 0.01);
  CHECK(m.loss_curve.back() < 0.01);
}
