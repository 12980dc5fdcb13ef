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

#include "doctest.h"
#include "helpers.hpp"
#include "tcgat/error.hpp"
#include "tcgat/gat.hpp"

using namespace tcgat;
using tcgat::test::random_tensor;

namespace {

using Mat = std::vector<std::vector<double>>;

Mat project(const Tensor64& h, const Tensor64& w) {
  Mat out(h.rows(), std::vector<double>(w.cols(), 0.0));
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      for (std::size_t k = 0; k < h.cols(); ++k) out[i][c] += h.at(i, k) * w.at(k, c);
    }
  }
  return out;
}

double lrelu(double x, double slope) { return x > 0 ? x : slope * x; }
double elu1(double x) { return x > 0 ? x : std::exp(x) - 1.0; }

// Attention row for query i over key projections, honoring the mask.
std::vector<double> attention_row(const Mat& q, const Mat& key, const Tensor64& a, const BinaryMatrix& adj,
                                  std::size_t i, MaskMode mode, double slope) {
  const auto L = q.size(), m = q[0].size();
  std::vector<double> e(L), alpha(L, 0.0);
  for (std::size_t j = 0; j < L; ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) s += a.at(c, 0) * q[i][c] + a.at(m + c, 0) * key[j][c];
    e[j] = lrelu(s, slope);
  }
  double z = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    if (mode == MaskMode::kLiteral || adj(i, j)) z += std::exp(e[j]);
  }
  for (std::size_t j = 0; j < L; ++j) {
    if (adj(i, j) && z > 0) alpha[j] = std::exp(e[j]) / z;
  }
  return alpha;
}

// Unrolled scalar form of the temporal layer.
Mat tgat_oracle(const Tensor64& h, const TimeMatrices& tm, const TGATParams<double>& p) {
  const auto L = h.rows();
  Mat out(L, std::vector<double>(p.heads * p.dim, 0.0));
  for (std::size_t k = 0; k < p.heads; ++k) {
    const auto q = project(h, p.weight(TimeState::kM, k));
    std::vector<std::vector<double>> acc(L, std::vector<double>(p.dim, 0.0));
    for (auto s : kTimeStates) {
      const auto key = project(h, p.weight(s, k));
      for (std::size_t i = 0; i < L; ++i) {
        const auto alpha = attention_row(q, key, p.attention[k], tm[s], i, p.mask_mode, p.leaky_slope);
        for (std::size_t j = 0; j < L; ++j) {
          for (std::size_t c = 0; c < p.dim; ++c) acc[i][c] += alpha[j] * key[j][c];
        }
      }
    }
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t c = 0; c < p.dim; ++c) out[i][k * p.dim + c] = elu1(acc[i][c]);
    }
  }
  return out;
}

Mat cgat_oracle(const Tensor64& h, const BinaryMatrix& adj, const CGATParams<double>& p) {
  const auto L = h.rows();
  Mat out(L, std::vector<double>(p.heads * p.dim, 0.0));
  for (std::size_t k = 0; k < p.heads; ++k) {
    const auto z = project(h, p.weights[k]);
    for (std::size_t i = 0; i < L; ++i) {
      const auto alpha = attention_row(z, z, p.attention[k], adj, i, MaskMode::kRenormalize, p.leaky_slope);
      for (std::size_t c = 0; c < p.dim; ++c) {
        double v = 0.0;
        for (std::size_t j = 0; j < L; ++j) v += alpha[j] * z[j][c];
        out[i][k * p.dim + c] = elu1(v);
      }
    }
  }
  return out;
}

void check_equal(const Tensor64& got, const Mat& want, double tol) {
  REQUIRE(got.rows() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    REQUIRE(got.cols() == want[i].size());
    for (std::size_t c = 0; c < want[i].size(); ++c) CHECK(std::abs(got.at(i, c) - want[i][c]) < tol);
  }
}

BinaryMatrix random_adj(std::size_t n, double density, const CounterRng& rng, bool diag = false) {
  BinaryMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m.set(i, j, rng.uniform(i * n + j) < density || (diag && i == j));
  }
  return m;
}

BinaryMatrix permuted(const BinaryMatrix& m, const std::vector<std::size_t>& perm) {
  BinaryMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out.set(i, j, m(perm[i], perm[j]));
  }
  return out;
}

std::vector<std::size_t> random_perm(std::size_t n, const CounterRng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i, i)]);
  return p;
}

}  // namespace

TEST_CASE("relation_scores") {
  auto p = TGATParams<double>::init(4, 1, 3, CounterRng(1));
  SUBCASE("zero attention vector gives zero scores") {
    p.attention[0] = Tensor64::zeros({6, 1});
    const auto e = relation_scores(random_tensor<double>(3, 4, CounterRng(2)), p, TimeState::kB);
    for (double v : e.data()) CHECK(v == 0.0);
  }
  SUBCASE("single node") {
    const auto h = random_tensor<double>(1, 4, CounterRng(2));
    const auto e = relation_scores(h, p, TimeState::kS);
    const auto q = project(h, p.weight(TimeState::kM, 0)), k = project(h, p.weight(TimeState::kS, 0));
    double want = 0.0;
    for (std::size_t c = 0; c < 3; ++c) want += p.attention[0].at(c, 0) * q[0][c] + p.attention[0].at(3 + c, 0) * k[0][c];
    CHECK(e.rows() == 1);
    CHECK(e.item() == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("double-loop pair oracle") {
    const auto h = random_tensor<double>(3, 4, CounterRng(3));
    const auto e = relation_scores(h, p, TimeState::kI);
    const auto q = project(h, p.weight(TimeState::kM, 0)), k = project(h, p.weight(TimeState::kI, 0));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        double want = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
          want += p.attention[0].at(c, 0) * q[i][c] + p.attention[0].at(3 + c, 0) * k[j][c];
        }
        CHECK(std::abs(e.at(i, j) - want) < 1e-6);
      }
    }
  }
}

TEST_CASE("relation_attention") {
  SUBCASE("single unmasked entry gets weight 1") {
    BinaryMatrix adj(3);
    adj.set(0, 2, true);
    const auto a = relation_attention(random_tensor<double>(3, 3, CounterRng(1)), adj);
    CHECK(a.at(0, 2) == 1.0);
    CHECK(a.at(1, 0) == 0.0);  // empty rows stay zero
  }
  SUBCASE("uniform scores") {
    BinaryMatrix adj(4);
    for (std::size_t j : {0, 1, 3}) adj.set(2, j, true);
    const auto a = relation_attention(Tensor64::full({4, 4}, 0.7), adj);
    for (std::size_t j : {0, 1, 3}) CHECK(a.at(2, j) == doctest::Approx(1.0 / 3.0));
    CHECK(a.at(2, 2) == 0.0);
  }
  SUBCASE("reference softmax") {
    BinaryMatrix adj(3);
    adj.set(0, 0, true);
    adj.set(0, 2, true);
    const auto scores = Tensor64::constant({3, 3}, {1, 2, 3, 0, 0, 0, 0, 0, 0});
    const auto a = relation_attention(scores, adj);
    CHECK(a.at(0, 0) == doctest::Approx(0.1192).epsilon(1e-3));
    CHECK(a.at(0, 1) == 0.0);
    CHECK(a.at(0, 2) == doctest::Approx(0.8808).epsilon(1e-3));
  }
}

TEST_CASE("tgat_layer") {
  SUBCASE("default heads and width") {
    const auto p = TGATParams<float>::init(300, 3, 100, CounterRng(1));
    const auto s = test::rain_floods();
    const auto y = tgat_layer(random_tensor<float>(5, 300, CounterRng(2)), build_time_matrices(s), p);
    CHECK(y.rows() == 5);
    CHECK(y.cols() == 300);
  }
  SUBCASE("isolated tokens reduce to ELU(h W_M)") {
    const auto p = TGATParams<double>::init(4, 2, 3, CounterRng(5));
    const auto h = random_tensor<double>(4, 4, CounterRng(6));
    TimeMatrices tm;
    for (auto& m : tm.adj) m = BinaryMatrix(4);
    tm[TimeState::kM] = BinaryMatrix::identity(4);
    const auto y = tgat_layer(h, tm, p);
    for (std::size_t k = 0; k < 2; ++k) {
      const auto z = project(h, p.weight(TimeState::kM, k));
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(y.at(i, k * 3 + c) == doctest::Approx(elu1(z[i][c])).epsilon(1e-12));
      }
    }
  }
  SUBCASE("unrolled oracle, both mask modes") {
    for (auto mode : {MaskMode::kRenormalize, MaskMode::kLiteral}) {
      for (std::uint64_t trial = 0; trial < 5; ++trial) {
        auto p = TGATParams<double>::init(5, 3, 4, CounterRng(7, trial));
        p.mask_mode = mode;
        const auto s = test::random_sentence(CounterRng(8, trial), 6, 0.5);
        const auto h = random_tensor<double>(s.size(), 5, CounterRng(9, trial));
        const auto tm = build_time_matrices(s);
        check_equal(tgat_layer(h, tm, p), tgat_oracle(h, tm, p), 1e-5);
      }
    }
    // Fixed 4-token sentence with every relation type present.
    AnnotatedSentence s{"four", {"a", "b", "c", "d"}, std::vector<CausalTag>(4, CausalTag::kO),
                        {{0, 1, TemporalRel::kB}, {1, 2, TemporalRel::kS}, {2, 3, TemporalRel::kI}}};
    normalize(s);
    const auto p = TGATParams<double>::init(6, 3, 5, CounterRng(3));
    const auto h = random_tensor<double>(4, 6, CounterRng(4));
    check_equal(tgat_layer(h, build_time_matrices(s), p), tgat_oracle(h, build_time_matrices(s), p), 1e-5);
  }
  SUBCASE("permutation equivariance") {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      const auto p = TGATParams<double>::init(4, 2, 3, CounterRng(11, trial));
      const auto s = test::random_sentence(CounterRng(12, trial), 8, 0.4);
      const auto n = s.size();
      const auto h = random_tensor<double>(n, 4, CounterRng(13, trial));
      const auto perm = random_perm(n, CounterRng(14, trial));
      auto tm = build_time_matrices(s);
      TimeMatrices tp;
      for (std::size_t k = 0; k < kNumTimeStates; ++k) tp.adj[k] = permuted(tm.adj[k], perm);
      const auto y = tgat_layer(h, tm, p);
      const auto yp = tgat_layer(gather_rows(h, std::span<const std::size_t>(perm)), tp, p);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < y.cols(); ++c) CHECK(yp.at(i, c) == doctest::Approx(y.at(perm[i], c)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("dropout only in training and reproducible") {
    const auto p = TGATParams<double>::init(4, 2, 3, CounterRng(1));
    const auto s = test::random_sentence(CounterRng(2), 8, 0.5);
    const auto h = random_tensor<double>(s.size(), 4, CounterRng(3));
    const auto tm = build_time_matrices(s);
    const DropoutContext on{true, CounterRng(4)};
    const auto a = tgat_layer(h, tm, p, on), b = tgat_layer(h, tm, p, on);
    CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
    const auto eval = tgat_layer(h, tm, p);
    check_equal(eval, tgat_oracle(h, tm, p), 1e-9);
  }
  SUBCASE("shape mismatch") {
    const auto p = TGATParams<double>::init(4, 1, 2, CounterRng(1));
    CHECK_THROWS_AS(tgat_layer(random_tensor<double>(5, 3, CounterRng(2)), build_time_matrices(test::rain_floods()), p),
                    Error);
    CHECK_THROWS_AS(tgat_layer(random_tensor<double>(4, 4, CounterRng(2)), build_time_matrices(test::rain_floods()), p),
                    Error);
  }
}

TEST_CASE("cgat_layer") {
  SUBCASE("default heads and width") {
    const auto p = CGATParams<float>::init(300, 3, 100, CounterRng(1));
    CHECK(cgat_layer(random_tensor<float>(6, 300, CounterRng(2)), BinaryMatrix::identity(6), p).cols() == 300);
  }
  SUBCASE("identity adjacency reduces to ELU(h W)") {
    const auto p = CGATParams<double>::init(4, 3, 2, CounterRng(3));
    const auto h = random_tensor<double>(5, 4, CounterRng(4));
    const auto y = cgat_layer(h, BinaryMatrix::identity(5), p);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto z = project(h, p.weights[k]);
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t c = 0; c < 2; ++c) CHECK(y.at(i, k * 2 + c) == doctest::Approx(elu1(z[i][c])).epsilon(1e-12));
      }
    }
  }
  SUBCASE("unrolled oracle") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      const auto p = CGATParams<double>::init(5, 3, 4, CounterRng(5, trial));
      const auto adj = random_adj(4, 0.4, CounterRng(6, trial), true);
      const auto h = random_tensor<double>(4, 5, CounterRng(7, trial));
      check_equal(cgat_layer(h, adj, p), cgat_oracle(h, adj, p), 1e-5);
    }
  }
  SUBCASE("permutation equivariance") {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      const auto p = CGATParams<double>::init(3, 2, 2, CounterRng(8, trial));
      const std::size_t n = 3 + trial % 5;
      const auto adj = random_adj(n, 0.3, CounterRng(9, trial), true);
      const auto h = random_tensor<double>(n, 3, CounterRng(10, trial));
      const auto perm = random_perm(n, CounterRng(11, trial));
      const auto y = cgat_layer(h, adj, p);
      const auto yp = cgat_layer(gather_rows(h, std::span<const std::size_t>(perm)), permuted(adj, perm), p);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < y.cols(); ++c) CHECK(yp.at(i, c) == doctest::Approx(y.at(perm[i], c)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("empty row is an error") {
    const auto p = CGATParams<double>::init(3, 1, 2, CounterRng(1));
    CHECK_THROWS_AS(cgat_layer(random_tensor<double>(3, 3, CounterRng(2)), BinaryMatrix(3), p), Error);
  }
}
