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
#include "tcgat/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "tcgat/model.hpp"

namespace tcgat {

namespace {

using T64 = Tensor64;
using Fn = std::function<T64(const std::vector<T64>&)>;

constexpr double kEps = 1e-5;

class Fixture {
 public:
  explicit Fixture(std::uint64_t seed) : rng_(CounterRng(seed).derive({0x6c})) {}

  T64 param(std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
    return T64::parameter({rows, cols}, values(rows * cols, lo, hi));
  }
  T64 constant(std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
    return T64::constant({rows, cols}, values(rows * cols, lo, hi));
  }
  BinaryMatrix random_mask(std::size_t n, double density, bool self_loops) {
    BinaryMatrix m(n);
    const auto r = rng_.derive({next_++});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, r.uniform(i * n + j) < density || (self_loops && i == j));
    }
    return m;
  }
  CounterRng rng() { return rng_.derive({next_++}); }

 private:
  std::vector<double> values(std::size_t n, double lo, double hi) {
    const auto r = rng_.derive({next_++});
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = r.uniform(k, lo, hi);
    return v;
  }

  CounterRng rng_;
  std::uint64_t next_ = 0;
};

// Contract an output with fixed random weights so every coordinate matters.
T64 contract(const T64& y, const T64& weights) { return sum(mul(y, weights)); }

GradCheckCase check(const std::string& name, const Fn& f, std::vector<T64> inputs) {
  const auto r = grad_check<double>(f, inputs, kEps);
  return {name, r.max_rel_error, r.coordinates, r.max_rel_error < kGradCheckTolerance};
}

std::vector<T64> flatten(const NamedParameters<double>& named) {
  std::vector<T64> out;
  for (const auto& [name, t] : named) out.push_back(t);
  return out;
}

}  // namespace

bool GradCheckSuite::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const GradCheckCase& c) { return c.passed; });
}

double GradCheckSuite::max_rel_error() const {
  double m = 0.0;
  for (const auto& c : cases) m = std::max(m, c.max_rel_error);
  return m;
}

std::string GradCheckSuite::to_text() const {
  std::ostringstream os;
  char line[160];
  for (const auto& c : cases) {
    std::snprintf(line, sizeof(line), "%-4s %-36s max_rel_err=%.3e coords=%zu\n", c.passed ? "ok" : "FAIL",
                  c.name.c_str(), c.max_rel_error, c.coordinates);
    os << line;
  }
  std::snprintf(line, sizeof(line), "%zu checks, max_rel_err=%.3e, tolerance=%.0e, %.2fs\n", cases.size(),
                max_rel_error(), kGradCheckTolerance, seconds);
  os << line;
  return os.str();
}

GradCheckSuite run_grad_check_suite(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Fixture fx(seed);
  GradCheckSuite suite;
  auto& out = suite.cases;

  // -- primitives -------------------------------------------------------------
  {
    const auto w = fx.constant(3, 2);
    out.push_back(check("matmul", [w](const auto& in) { return contract(matmul(in[0], in[1]), w); },
                        {fx.param(3, 4), fx.param(4, 2)}));
  }
  {
    const auto w = fx.constant(3, 4);
    out.push_back(check("add", [w](const auto& in) { return contract(add(in[0], in[1]), w); },
                        {fx.param(3, 4), fx.param(3, 4)}));
    out.push_back(check("add (row broadcast)", [w](const auto& in) { return contract(add(in[0], in[1]), w); },
                        {fx.param(3, 4), fx.param(1, 4)}));
    out.push_back(check("sub", [w](const auto& in) { return contract(sub(in[0], in[1]), w); },
                        {fx.param(3, 4), fx.param(3, 4)}));
    out.push_back(check("mul", [w](const auto& in) { return contract(mul(in[0], in[1]), w); },
                        {fx.param(3, 4), fx.param(3, 4)}));
    out.push_back(check("scale", [w](const auto& in) { return contract(scale(in[0], -2.5), w); }, {fx.param(3, 4)}));
    out.push_back(check("transpose", [w](const auto& in) { return contract(transpose(in[0]), w); }, {fx.param(4, 3)}));
    out.push_back(check("leaky_relu", [w](const auto& in) { return contract(leaky_relu(in[0], 0.008), w); },
                        {fx.param(3, 4)}));
    out.push_back(check("sigmoid", [w](const auto& in) { return contract(sigmoid(in[0]), w); }, {fx.param(3, 4, -3, 3)}));
    out.push_back(check("tanh", [w](const auto& in) { return contract(tanh(in[0]), w); }, {fx.param(3, 4, -2, 2)}));
    out.push_back(check("elu", [w](const auto& in) { return contract(elu(in[0]), w); }, {fx.param(3, 4, -2, 2)}));
    const auto rng = fx.rng();
    out.push_back(check("dropout (fixed mask)",
                        [w, rng](const auto& in) { return contract(dropout(in[0], 0.3, true, rng), w); },
                        {fx.param(3, 4)}));
    out.push_back(check("sum", [](const auto& in) { return sum(in[0]); }, {fx.param(3, 4)}));
    out.push_back(check("mean", [](const auto& in) { return scale(mean(mul(in[0], in[0])), 3.0); }, {fx.param(3, 4)}));
  }
  {
    const auto w0 = fx.constant(5, 3);
    out.push_back(check("concat axis 0",
                        [w0](const auto& in) {
                          const T64 parts[] = {in[0], in[1]};
                          return contract(concat(std::span<const T64>(parts), 0), w0);
                        },
                        {fx.param(2, 3), fx.param(3, 3)}));
    const auto w1 = fx.constant(2, 5);
    out.push_back(check("concat axis 1",
                        [w1](const auto& in) {
                          const T64 parts[] = {in[0], in[1]};
                          return contract(concat(std::span<const T64>(parts), 1), w1);
                        },
                        {fx.param(2, 2), fx.param(2, 3)}));
    const auto ws = fx.constant(2, 4);
    out.push_back(check("slice_rows", [ws](const auto& in) { return contract(slice_rows(in[0], 1, 2), ws); },
                        {fx.param(4, 4)}));
    const auto wc = fx.constant(4, 2);
    out.push_back(check("slice_cols", [wc](const auto& in) { return contract(slice_cols(in[0], 1, 2), wc); },
                        {fx.param(4, 4)}));
    const auto wg = fx.constant(4, 3);
    out.push_back(check("gather_rows (repeated index)",
                        [wg](const auto& in) {
                          const std::size_t idx[] = {2, 0, 2, 4};
                          return contract(gather_rows(in[0], std::span<const std::size_t>(idx)), wg);
                        },
                        {fx.param(5, 3)}));
  }
  {
    const auto mask = fx.random_mask(4, 0.5, true);
    const auto w = fx.constant(4, 4);
    std::vector<std::uint8_t> cells(mask.cells().begin(), mask.cells().end());
    out.push_back(check("masked_softmax renormalize axis 1",
                        [w, cells](const auto& in) {
                          return contract(masked_softmax(in[0], std::span<const std::uint8_t>(cells), 1), w);
                        },
                        {fx.param(4, 4, -2, 2)}));
    out.push_back(check("masked_softmax renormalize axis 0",
                        [w, cells](const auto& in) {
                          return contract(masked_softmax(in[0], std::span<const std::uint8_t>(cells), 0), w);
                        },
                        {fx.param(4, 4, -2, 2)}));
    out.push_back(check("masked_softmax literal",
                        [w, cells](const auto& in) {
                          return contract(masked_softmax(in[0], std::span<const std::uint8_t>(cells), 1,
                                                         MaskMode::kLiteral),
                                          w);
                        },
                        {fx.param(4, 4, -2, 2)}));
  }
  {
    const CausalTag gold[] = {CausalTag::kO, CausalTag::kC, CausalTag::kE, CausalTag::kC};
    const auto y = one_hot<double>(gold);
    out.push_back(check("cross_entropy", [y](const auto& in) { return cross_entropy(in[0], y); },
                        {fx.param(4, 3, 0.1, 0.9)}));
    const auto mask = fx.random_mask(4, 0.6, true);
    std::vector<std::uint8_t> cells(mask.cells().begin(), mask.cells().end());
    const auto probe = fx.constant(4, 3);
    out.push_back(check("masked_softmax + cross_entropy",
                        [y, cells, probe](const auto& in) {
                          const auto alpha = masked_softmax(in[0], std::span<const std::uint8_t>(cells));
                          return cross_entropy(softmax_rows(matmul(alpha, probe)), y);
                        },
                        {fx.param(4, 4, -2, 2)}));
  }

  // -- composed layers ----------------------------------------------------------
  {
    auto p = BiLSTMParams<double>::init(4, 3, fx.rng());
    const auto x = fx.constant(3, 4);
    const auto w = fx.constant(3, 6);
    out.push_back(check("bilstm (3 steps)",
                        [x, w](const auto& in) {
                          BiLSTMParams<double> q{4, 3, {in[0], in[1], in[2]}, {in[3], in[4], in[5]}};
                          return contract(bilstm_forward(x, q), w);
                        },
                        {p.fwd.w_x, p.fwd.w_h, p.fwd.b, p.bwd.w_x, p.bwd.w_h, p.bwd.b}));
  }
  for (auto mode : {MaskMode::kRenormalize, MaskMode::kLiteral}) {
    constexpr std::size_t kTokens = 6, kIn = 5, kHeads = 2, kDim = 3;
    auto p = TGATParams<double>::init(kIn, kHeads, kDim, fx.rng());
    p.mask_mode = mode;
    TimeMatrices tm;
    for (auto s : kTimeStates) tm[s] = fx.random_mask(kTokens, 0.3, s == TimeState::kM);
    const auto w = fx.constant(kTokens, kHeads * kDim);
    std::vector<T64> inputs{fx.param(kTokens, kIn)};
    for (auto s : kTimeStates) {
      for (std::size_t k = 0; k < kHeads; ++k) inputs.push_back(p.weight(s, k));
    }
    for (std::size_t k = 0; k < kHeads; ++k) inputs.push_back(p.attention[k]);
    out.push_back(check(mode == MaskMode::kLiteral ? "tgat_layer (literal)" : "tgat_layer (renormalize)",
                        [=](const auto& in) {
                          auto q = p;
                          std::size_t next = 1;
                          for (std::size_t s = 0; s < kNumTimeStates; ++s) {
                            for (std::size_t k = 0; k < kHeads; ++k) q.weights[s][k] = in[next++];
                          }
                          for (std::size_t k = 0; k < kHeads; ++k) q.attention[k] = in[next++];
                          return contract(tgat_layer(in[0], tm, q), w);
                        },
                        inputs));
  }
  {
    constexpr std::size_t kTokens = 5, kIn = 4, kHeads = 2, kDim = 3;
    auto p = CGATParams<double>::init(kIn, kHeads, kDim, fx.rng());
    const auto adj = fx.random_mask(kTokens, 0.4, true);
    const auto w = fx.constant(kTokens, kHeads * kDim);
    std::vector<T64> inputs{fx.param(kTokens, kIn)};
    for (std::size_t k = 0; k < kHeads; ++k) {
      inputs.push_back(p.weights[k]);
      inputs.push_back(p.attention[k]);
    }
    out.push_back(check("cgat_layer",
                        [=](const auto& in) {
                          auto q = p;
                          for (std::size_t k = 0; k < kHeads; ++k) {
                            q.weights[k] = in[1 + 2 * k];
                            q.attention[k] = in[2 + 2 * k];
                          }
                          return contract(cgat_layer(in[0], adj, q), w);
                        },
                        inputs));
  }
  {
    constexpr std::size_t kTokens = 4, kTc = 6, kCtx = 5, kDim = 3;
    auto eq = EquilibriumParams<double>::init(kTc, kCtx, kDim, fx.rng());
    auto cls = ClassifierParams<double>::init(kDim, fx.rng());
    const CausalTag gold[] = {CausalTag::kO, CausalTag::kC, CausalTag::kO, CausalTag::kE};
    std::vector<CausalTag> tags(std::begin(gold), std::end(gold));
    out.push_back(check("equilibrium + classifier + loss",
                        [tags](const auto& in) {
                          const EquilibriumParams<double> e{in[2], in[3], in[4], in[5]};
                          const ClassifierParams<double> c{in[6], in[7]};
                          const auto fused = equilibrium_fuse(matmul(in[0], e.proj_tc), matmul(in[1], e.proj_ctx), e);
                          return token_loss(classify(fused, c), std::span<const CausalTag>(tags));
                        },
                        {fx.param(kTokens, kTc), fx.param(kTokens, kCtx), eq.proj_tc, eq.proj_ctx, eq.gate_w,
                         eq.gate_b, cls.w, cls.b}));
  }
  {
    // Reduced end-to-end model, learned embeddings.
    AnnotatedSentence s{"g", {"heavy", "rain", "caused", "the", "floods"},
                        {CausalTag::kO, CausalTag::kC, CausalTag::kO, CausalTag::kO, CausalTag::kE},
                        {{1, 4, TemporalRel::kB}, {3, 2, TemporalRel::kS}}};
    normalize(s);
    const auto kg = build_causal_kg(std::span<const AnnotatedSentence>(&s, 1));
    const auto vocab = Vocabulary::build(std::span<const AnnotatedSentence>(&s, 1));
    TrainConfig cfg;
    cfg.embed_dim = 4;
    cfg.bilstm_hidden = 3;
    cfg.tgat_dim = 2;
    cfg.tgat_heads = 2;
    cfg.cgat_dim = 2;
    cfg.cgat_heads = 1;
    cfg.fuse_dim = 3;
    const auto net = Network<double>::init(cfg, vocab.size(), EmbeddingMode::kLearned, 0, seed + 1);
    const auto names = net.named_parameters();
    const auto inputs = prepare_inputs(s, kg, vocab);
    out.push_back(check("full model (reduced dims)",
                        [net, names, cfg, inputs, s](const auto& in) {
                          auto copy = net;
                          // Rebind every parameter handle to the perturbed leaves.
                          auto bound = copy.named_parameters();
                          for (std::size_t i = 0; i < bound.size(); ++i) {
                            auto dst = bound[i].second.mutable_data();
                            std::copy(in[i].data().begin(), in[i].data().end(), dst.begin());
                          }
                          const auto tr = forward(copy, cfg, inputs, nullptr);
                          return token_loss(tr.probs, std::span<const CausalTag>(s.causal_tags));
                        },
                        flatten(names)));
  }

  suite.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return suite;
}

}  // namespace tcgat
