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
#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "tcgat/encoder.hpp"
#include "tcgat/error.hpp"

using namespace tcgat;
using tcgat::test::random_tensor;

namespace {

std::vector<std::uint8_t> bytes_of(const EmbeddingTable& t) {
  std::ostringstream out;
  t.write(out);
  const auto s = out.str();
  return {s.begin(), s.end()};
}

template <typename U>
void append(std::vector<std::uint8_t>& b, U v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  b.insert(b.end(), p, p + sizeof(U));
}

// Hand-assembled file following the documented layout byte for byte.
std::vector<std::uint8_t> handmade(const std::string& id, std::uint16_t tokens, std::uint32_t dim) {
  std::vector<std::uint8_t> b{'T', 'C', 'E', 'M', 'B', '1'};
  append<std::uint32_t>(b, dim);
  append<std::uint32_t>(b, 1);
  append<std::uint16_t>(b, static_cast<std::uint16_t>(id.size()));
  b.insert(b.end(), id.begin(), id.end());
  append<std::uint16_t>(b, tokens);
  for (std::uint32_t k = 0; k < tokens * dim; ++k) append<float>(b, 0.5f * static_cast<float>(k) - 3.0f);
  return b;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Per-timestep scalar recurrence for one direction.
std::vector<double> scalar_lstm(const Tensor64& x, const LstmDirection<double>& d, std::size_t H, bool reverse) {
  const auto L = x.rows(), n = x.cols();
  std::vector<double> h(H, 0.0), c(H, 0.0), out(L * H);
  for (std::size_t k = 0; k < L; ++k) {
    const auto t = reverse ? L - 1 - k : k;
    std::vector<double> z(4 * H);
    for (std::size_t g = 0; g < 4 * H; ++g) {
      double acc = d.b.at(0, g);
      for (std::size_t i = 0; i < n; ++i) acc += x.at(t, i) * d.w_x.at(i, g);
      for (std::size_t i = 0; i < H; ++i) acc += h[i] * d.w_h.at(i, g);
      z[g] = acc;
    }
    for (std::size_t u = 0; u < H; ++u) {
      const double ig = sig(z[u]), fg = sig(z[H + u]), og = sig(z[2 * H + u]), gg = std::tanh(z[3 * H + u]);
      c[u] = fg * c[u] + ig * gg;
      h[u] = og * std::tanh(c[u]);
      out[t * H + u] = h[u];
    }
  }
  return out;
}

Tensor64 reverse_rows(const Tensor64& x) {
  std::vector<std::size_t> idx(x.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = idx.size() - 1 - i;
  return gather_rows(x, std::span<const std::size_t>(idx));
}

}  // namespace

TEST_CASE("TCEMB1 round trip") {
  EmbeddingTable t(3);
  t.add("s1", 2, {1, 2, 3, 4, 5, 6});
  t.add("s0", 1, {-1.5f, 0.0f, 7.25f});
  const auto back = EmbeddingTable::read(bytes_of(t));
  CHECK(back.dim() == 3);
  CHECK(back.ids() == std::vector<std::string>{"s1", "s0"});
  CHECK(back.at("s1").values == t.at("s1").values);
  CHECK(back.at("s0").values == t.at("s0").values);
}

TEST_CASE("TCEMB1 hand-assembled file") {
  const auto bytes = handmade("s1", 5, 768);
  CHECK(bytes.size() == 6 + 4 + 4 + 2 + 2 + 2 + 5 * 768 * 4);
  const auto table = EmbeddingTable::read(bytes);
  const auto& e = table.at("s1");
  CHECK(e.tokens == 5);
  REQUIRE(e.values.size() == 5 * 768);
  CHECK(std::memcmp(e.values.data(), bytes.data() + 20, e.values.size() * sizeof(float)) == 0);
}

TEST_CASE("TCEMB1 validation") {
  auto bytes = handmade("s1", 2, 4);
  SUBCASE("bad magic") {
    bytes[5] = '2';
    CHECK_THROWS_AS(EmbeddingTable::read(bytes), Error);
  }
  SUBCASE("truncated") {
    bytes.pop_back();
    CHECK_THROWS_AS(EmbeddingTable::read(bytes), Error);
  }
  SUBCASE("trailing bytes") {
    bytes.push_back(0);
    CHECK_THROWS_AS(EmbeddingTable::read(bytes), Error);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(EmbeddingTable::load("/nonexistent/x.tcemb"), Error); }
}

TEST_CASE("external embeddings") {
  AnnotatedSentence s{"s1", {"a", "b", "c", "d", "e"}, std::vector<CausalTag>(5, CausalTag::kO), {}};
  const auto table = EmbeddingTable::read(handmade("s1", 5, 768));
  SUBCASE("bit-equal to file contents") {
    const auto x = embed_external<float>(table, s, 768);
    CHECK(x.rows() == 5);
    CHECK(x.cols() == 768);
    CHECK(std::memcmp(x.data().data(), table.at("s1").values.data(), 5 * 768 * sizeof(float)) == 0);
  }
  SUBCASE("count mismatch") {
    const auto short_table = EmbeddingTable::read(handmade("s1", 4, 768));
    try {
      (void)embed_external<float>(short_table, s, 768);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("token/vector count mismatch") != std::string::npos);
    }
  }
  SUBCASE("dim mismatch") { CHECK_THROWS_AS(embed_external<float>(table, s, 300), Error); }
  SUBCASE("missing id") {
    s.id = "other";
    CHECK_THROWS_AS(embed_external<float>(table, s, 768), Error);
  }
}

TEST_CASE("vocabulary and learned lookup") {
  const auto s = test::rain_floods();
  const auto vocab = Vocabulary::build(std::span<const AnnotatedSentence>(&s, 1));
  CHECK(vocab.lookup("<unk>") == 0);
  CHECK(vocab.lookup("unseen") == 0);
  CHECK(vocab.lookup("the") == vocab.lookup("The"));
  CHECK(vocab.size() == 5);  // <unk>, the, rain, caused, floods
  const auto table = random_tensor<double>(vocab.size(), kLearnedEmbeddingDim, CounterRng(4));
  AnnotatedSentence one{"o", {"rain"}, {CausalTag::kO}, {}};
  const auto x = embed_learned(table, vocab, one);
  CHECK(x.rows() == 1);
  CHECK(x.cols() == 300);
  const auto r = vocab.lookup("rain");
  for (std::size_t k = 0; k < 300; ++k) CHECK(x.at(0, k) == table.at(r, k));
}

TEST_CASE("bilstm with zero parameters outputs zeros") {
  const auto p = BiLSTMParams<double>::zeros(4, 3);
  const auto y = bilstm_forward(random_tensor<double>(5, 4, CounterRng(1)), p);
  CHECK(y.rows() == 5);
  CHECK(y.cols() == 6);
  for (double v : y.data()) CHECK(v == 0.0);
}

TEST_CASE("bilstm matches the scalar recurrence") {
  const auto p = BiLSTMParams<double>::init(5, 3, CounterRng(8));
  const auto x = random_tensor<double>(4, 5, CounterRng(9));
  const auto y = bilstm_forward(x, p);
  const auto f = scalar_lstm(x, p.fwd, 3, false);
  const auto b = scalar_lstm(x, p.bwd, 3, true);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t u = 0; u < 3; ++u) {
      CHECK(y.at(t, u) == doctest::Approx(f[t * 3 + u]).epsilon(1e-10));
      CHECK(y.at(t, 3 + u) == doctest::Approx(b[t * 3 + u]).epsilon(1e-10));
    }
  }
}

TEST_CASE("bilstm single step: both directions see the same step") {
  auto p = BiLSTMParams<double>::init(3, 2, CounterRng(2));
  p.bwd = p.fwd;
  const auto y = bilstm_forward(random_tensor<double>(1, 3, CounterRng(3)), p);
  CHECK(y.at(0, 0) == y.at(0, 2));
  CHECK(y.at(0, 1) == y.at(0, 3));
}

TEST_CASE("bilstm reversal symmetry") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto p = BiLSTMParams<double>::init(4, 3, CounterRng(10, k));
    const auto x = random_tensor<double>(2 + k % 5, 4, CounterRng(20, k));
    const auto backward = lstm_forward(x, p.bwd, 3, true);
    const auto via_forward = reverse_rows(lstm_forward(reverse_rows(x), p.bwd, 3, false));
    for (std::size_t i = 0; i < backward.numel(); ++i) {
      CHECK(backward.data()[i] == doctest::Approx(via_forward.data()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("bilstm default shape and forget bias") {
  const auto p = BiLSTMParams<float>::init(300, 150, CounterRng(1));
  const auto y = bilstm_forward(random_tensor<float>(7, 300, CounterRng(2)), p);
  CHECK(y.rows() == 7);
  CHECK(y.cols() == 300);
  CHECK(p.fwd.b.at(0, 150) == 1.0f);
  CHECK(p.fwd.b.at(0, 0) == 0.0f);
  CHECK_THROWS_AS(bilstm_forward(random_tensor<float>(2, 299, CounterRng(2)), p), Error);
}
