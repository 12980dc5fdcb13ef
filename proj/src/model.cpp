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
#include "tcgat/model.hpp"

#include <cmath>

#include "tcgat/error.hpp"

namespace tcgat {

SentenceInputs prepare_inputs(const AnnotatedSentence& s, const CausalKG& kg, const Vocabulary& vocab) {
  return {&s, build_time_matrices(s), sentence_causal_adj(kg, s), vocab.encode(s)};
}

template <typename T>
NamedParameters<T> Network<T>::named_parameters() const {
  NamedParameters<T> out;
  if (mode == EmbeddingMode::kLearned) out.emplace_back("embed.table", embedding);
  else out.emplace_back("embed.input_proj", input_proj);
  const auto lstm = [&](const char* dir, const LstmDirection<T>& d) {
    out.emplace_back(std::string("bilstm.") + dir + ".w_x", d.w_x);
    out.emplace_back(std::string("bilstm.") + dir + ".w_h", d.w_h);
    out.emplace_back(std::string("bilstm.") + dir + ".b", d.b);
  };
  lstm("fwd", bilstm.fwd);
  lstm("bwd", bilstm.bwd);
  for (auto s : kTimeStates) {
    for (std::size_t k = 0; k < tgat.heads; ++k) {
      out.emplace_back("tgat.w_" + std::string(1, time_state_symbol(s)) + ".head" + std::to_string(k),
                       tgat.weight(s, k));
    }
  }
  for (std::size_t k = 0; k < tgat.heads; ++k) out.emplace_back("tgat.a.head" + std::to_string(k), tgat.attention[k]);
  for (std::size_t k = 0; k < cgat.heads; ++k) {
    out.emplace_back("cgat.w.head" + std::to_string(k), cgat.weights[k]);
    out.emplace_back("cgat.a.head" + std::to_string(k), cgat.attention[k]);
  }
  out.emplace_back("fuse.proj_tc", fuse.proj_tc);
  out.emplace_back("fuse.proj_ctx", fuse.proj_ctx);
  out.emplace_back("fuse.gate_w", fuse.gate_w);
  out.emplace_back("fuse.gate_b", fuse.gate_b);
  out.emplace_back("classifier.w", classifier.w);
  out.emplace_back("classifier.b", classifier.b);
  return out;
}

template <typename T>
Network<T> Network<T>::init(const TrainConfig& c, std::size_t vocab_size, EmbeddingMode mode,
                            std::size_t context_dim, std::uint64_t seed) {
  c.validate();
  const CounterRng rng = CounterRng(seed).derive({0x1417});
  Network net;
  net.mode = mode;
  std::size_t ctx_dim = c.embed_dim;
  if (mode == EmbeddingMode::kLearned) {
    std::vector<T> table(vocab_size * c.embed_dim);
    const auto er = rng.derive({1});
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = static_cast<T>(er.uniform(k, -0.1, 0.1));
    net.embedding = BasicTensor<T>::parameter({vocab_size, c.embed_dim}, std::move(table));
  } else {
    if (context_dim == 0) fail(ErrorKind::kValidation, "external embeddings need a positive dimension");
    ctx_dim = context_dim;
    const double bound = std::sqrt(6.0 / static_cast<double>(context_dim + c.embed_dim));
    std::vector<T> proj(context_dim * c.embed_dim);
    const auto pr = rng.derive({2});
    for (std::size_t k = 0; k < proj.size(); ++k) proj[k] = static_cast<T>(pr.uniform(k, -bound, bound));
    net.input_proj = BasicTensor<T>::parameter({context_dim, c.embed_dim}, std::move(proj));
  }
  net.bilstm = BiLSTMParams<T>::init(c.embed_dim, c.bilstm_hidden, rng.derive({3}));
  const auto enc = 2 * c.bilstm_hidden;
  net.tgat = TGATParams<T>::init(enc, c.tgat_heads, c.tgat_dim, rng.derive({4}));
  net.tgat.leaky_slope = static_cast<T>(c.tgat_leaky_slope);
  net.tgat.dropout = c.tgat_dropout;
  net.tgat.mask_mode = c.mask_mode;
  net.cgat = CGATParams<T>::init(enc, c.cgat_heads, c.cgat_dim, rng.derive({5}));
  net.cgat.leaky_slope = static_cast<T>(c.cgat_leaky_slope);
  net.cgat.dropout = c.cgat_dropout;
  net.fuse = EquilibriumParams<T>::init(net.tgat.output_dim() + net.cgat.output_dim(), ctx_dim, c.fuse_dim,
                                        rng.derive({6}));
  net.classifier = ClassifierParams<T>::init(c.fuse_dim, rng.derive({7}));
  return net;
}

template <typename T>
ForwardTrace<T> forward(const Network<T>& net, const TrainConfig& c, const SentenceInputs& in,
                        const EmbeddingTable* external, const DropoutContext& drop) {
  const auto& s = *in.sentence;
  ForwardTrace<T> tr;
  BasicTensor<T> lstm_input;
  if (net.mode == EmbeddingMode::kLearned) {
    tr.context = gather_rows(net.embedding, std::span<const std::size_t>(in.token_ids));
    lstm_input = tr.context;
  } else {
    if (external == nullptr) fail(ErrorKind::kValidation, "model expects external embeddings but none were given");
    tr.context = embed_external<T>(*external, s, net.input_proj.rows());
    lstm_input = matmul(tr.context, net.input_proj);
  }

  const Variant v = c.variant;
  if (v != Variant::kContextOnly) {
    tr.encoded = bilstm_forward(lstm_input, net.bilstm);
    const auto rows = s.size();
    tr.tgat = v == Variant::kCGATOnly
                  ? BasicTensor<T>::zeros({rows, net.tgat.output_dim()})
                  : tgat_layer(tr.encoded, in.time, net.tgat, {drop.train, drop.rng.derive({1})});
    tr.cgat = v == Variant::kTGATOnly
                  ? BasicTensor<T>::zeros({rows, net.cgat.output_dim()})
                  : cgat_layer(tr.encoded, in.causal, net.cgat, {drop.train, drop.rng.derive({2})});
    const BasicTensor<T> parts[] = {tr.tgat, tr.cgat};
    tr.tc_input = concat(std::span<const BasicTensor<T>>(parts), 1);
    tr.h_tc = matmul(tr.tc_input, net.fuse.proj_tc);
  }
  if (v != Variant::kNoContext) tr.h_ctx = matmul(tr.context, net.fuse.proj_ctx);

  switch (v) {
    case Variant::kNoContext: tr.fused = tr.h_tc; break;
    case Variant::kContextOnly: tr.fused = tr.h_ctx; break;
    case Variant::kNoEquilibrium: tr.fused = add(tr.h_tc, tr.h_ctx); break;
    case Variant::kFull:
    case Variant::kTGATOnly:
    case Variant::kCGATOnly:
      tr.gate = equilibrium_gate(tr.h_tc, tr.h_ctx, net.fuse);
      tr.fused = gated_mix(tr.gate, tr.h_tc, tr.h_ctx);
      break;
  }
  tr.probs = classify(tr.fused, net.classifier);
  return tr;
}

template struct Network<float>;
template struct Network<double>;
template ForwardTrace<float> forward(const Network<float>&, const TrainConfig&, const SentenceInputs&,
                                     const EmbeddingTable*, const DropoutContext&);
template ForwardTrace<double> forward(const Network<double>&, const TrainConfig&, const SentenceInputs&,
                                      const EmbeddingTable*, const DropoutContext&);

}  // namespace tcgat
