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
#include "tcgat/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

#include "tcgat/error.hpp"

namespace tcgat {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr char kEmbeddingMagic[] = {'T', 'C', 'E', 'M', 'B', '1'};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename U>
  U get() {
    U v{};
    take(&v, sizeof(U));
    return v;
  }
  void take(void* dst, std::size_t n) {
    if (n > bytes_.size() - pos_) fail(ErrorKind::kIo, "embedding file truncated at byte " + std::to_string(pos_));
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename U>
void put(std::ostream& out, U v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(U));
}

}  // namespace

const EmbeddingTable::Entry& EmbeddingTable::at(const std::string& id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) fail(ErrorKind::kValidation, "embedding file has no vectors for sentence \"" + id + "\"");
  return it->second;
}

void EmbeddingTable::add(const std::string& id, std::size_t tokens, std::vector<float> values) {
  if (values.size() != tokens * dim_) {
    fail(ErrorKind::kArgument, "embedding entry \"" + id + "\": " + std::to_string(values.size()) +
                                   " values for " + std::to_string(tokens) + " tokens of dim " + std::to_string(dim_));
  }
  if (id.size() > 0xffff || tokens > 0xffff) fail(ErrorKind::kArgument, "embedding entry \"" + id + "\" too large");
  if (!entries_.emplace(id, Entry{tokens, std::move(values)}).second) {
    fail(ErrorKind::kArgument, "duplicate embedding entry \"" + id + "\"");
  }
  order_.push_back(id);
}

void EmbeddingTable::write(std::ostream& out) const {
  out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(order_.size()));
  for (const auto& id : order_) {
    const auto& e = entries_.at(id);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    put<std::uint16_t>(out, static_cast<std::uint16_t>(e.tokens));
    out.write(reinterpret_cast<const char*>(e.values.data()),
              static_cast<std::streamsize>(e.values.size() * sizeof(float)));
  }
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write(out);
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

EmbeddingTable EmbeddingTable::read(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  char magic[sizeof(kEmbeddingMagic)];
  in.take(magic, sizeof(magic));
  if (std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) != 0) fail(ErrorKind::kIo, "not a TCEMB1 embedding file");
  const auto dim = in.get<std::uint32_t>();
  const auto count = in.get<std::uint32_t>();
  if (dim == 0) fail(ErrorKind::kIo, "embedding file declares dim 0");
  EmbeddingTable table(dim);
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string id(in.get<std::uint16_t>(), '\0');
    in.take(id.data(), id.size());
    const auto tokens = in.get<std::uint16_t>();
    std::vector<float> values(static_cast<std::size_t>(tokens) * dim);
    in.take(values.data(), values.size() * sizeof(float));
    if (table.contains(id)) fail(ErrorKind::kIo, "embedding file repeats sentence id \"" + id + "\"");
    table.add(id, tokens, std::move(values));
  }
  if (in.remaining() != 0) {
    fail(ErrorKind::kIo, "embedding file has " + std::to_string(in.remaining()) + " trailing bytes");
  }
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open embedding file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return read(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

Vocabulary Vocabulary::build(std::span<const AnnotatedSentence> sentences) {
  Vocabulary v;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      auto w = normalize_token(t);
      if (!v.index_.contains(w)) {
        v.index_.emplace(w, v.tokens_.size());
        v.tokens_.push_back(std::move(w));
      }
    }
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens.front() != kUnkToken) {
    fail(ErrorKind::kValidation, "vocabulary must start with the unknown-token row");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 1; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second) {
      fail(ErrorKind::kValidation, "duplicate vocabulary entry \"" + v.tokens_[i] + "\"");
    }
  }
  return v;
}

std::size_t Vocabulary::lookup(const std::string& token) const {
  const auto it = index_.find(normalize_token(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::encode(const AnnotatedSentence& s) const {
  std::vector<std::size_t> ids;
  ids.reserve(s.size());
  for (const auto& t : s.tokens) ids.push_back(lookup(t));
  return ids;
}

template <typename T>
BasicTensor<T> embed_learned(const BasicTensor<T>& table, const Vocabulary& vocab, const AnnotatedSentence& s) {
  if (table.rows() != vocab.size()) {
    fail(ErrorKind::kArgument, "embedding table has " + std::to_string(table.rows()) + " rows for a vocabulary of " +
                                   std::to_string(vocab.size()));
  }
  const auto ids = vocab.encode(s);
  return gather_rows(table, std::span<const std::size_t>(ids));
}

template <typename T>
BasicTensor<T> embed_external(const EmbeddingTable& table, const AnnotatedSentence& s, std::size_t expected_dim) {
  if (table.dim() != expected_dim) {
    fail(ErrorKind::kValidation, "embedding dim " + std::to_string(table.dim()) + " does not match configured dim " +
                                     std::to_string(expected_dim));
  }
  const auto& e = table.at(s.id);
  if (e.tokens != s.size()) {
    fail(ErrorKind::kValidation, "sentence \"" + s.id + "\": token/vector count mismatch (" +
                                     std::to_string(s.size()) + " tokens, " + std::to_string(e.tokens) + " vectors)");
  }
  return BasicTensor<T>::constant({e.tokens, table.dim()}, std::vector<T>(e.values.begin(), e.values.end()));
}

namespace {

template <typename T>
BasicTensor<T> uniform_param(Shape shape, double bound, const CounterRng& rng) {
  std::vector<T> v(shape_numel(shape));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<T>(rng.uniform(k, -bound, bound));
  return BasicTensor<T>::parameter(std::move(shape), std::move(v));
}

template <typename T>
LstmDirection<T> init_direction(std::size_t in, std::size_t h, const CounterRng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(h));
  std::vector<T> bias(4 * h, T(0));
  for (std::size_t k = h; k < 2 * h; ++k) bias[k] = T(1);
  return {uniform_param<T>({in, 4 * h}, bound, rng.derive({1})), uniform_param<T>({h, 4 * h}, bound, rng.derive({2})),
          BasicTensor<T>::parameter({1, 4 * h}, std::move(bias))};
}

template <typename T>
LstmDirection<T> zero_direction(std::size_t in, std::size_t h) {
  return {BasicTensor<T>::parameter({in, 4 * h}, std::vector<T>(in * 4 * h, T(0))),
          BasicTensor<T>::parameter({h, 4 * h}, std::vector<T>(h * 4 * h, T(0))),
          BasicTensor<T>::parameter({1, 4 * h}, std::vector<T>(4 * h, T(0)))};
}

}  // namespace

template <typename T>
BiLSTMParams<T> BiLSTMParams<T>::init(std::size_t input_dim, std::size_t hidden, const CounterRng& rng) {
  return {input_dim, hidden, init_direction<T>(input_dim, hidden, rng.derive({0xf})),
          init_direction<T>(input_dim, hidden, rng.derive({0xb}))};
}

template <typename T>
BiLSTMParams<T> BiLSTMParams<T>::zeros(std::size_t input_dim, std::size_t hidden) {
  return {input_dim, hidden, zero_direction<T>(input_dim, hidden), zero_direction<T>(input_dim, hidden)};
}

template <typename T>
BasicTensor<T> lstm_forward(const BasicTensor<T>& x, const LstmDirection<T>& dir, std::size_t hidden, bool reverse) {
  const auto h4 = 4 * hidden;
  if (x.rank() != 2 || dir.w_x.rows() != x.cols() || dir.w_x.cols() != h4 || dir.w_h.rows() != hidden ||
      dir.w_h.cols() != h4 || dir.b.numel() != h4) {
    fail(ErrorKind::kArgument, "lstm: shape mismatch: input " + shape_string(x.shape()) + ", W_x " +
                                   shape_string(dir.w_x.shape()) + ", W_h " + shape_string(dir.w_h.shape()));
  }
  const auto steps = x.rows();
  // Input contributions for every step at once.
  const auto xw = add(matmul(x, dir.w_x), dir.b);
  auto h = BasicTensor<T>::zeros({1, hidden});
  auto c = BasicTensor<T>::zeros({1, hidden});
  std::vector<BasicTensor<T>> states(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto t = reverse ? steps - 1 - k : k;
    const auto z = add(slice_rows(xw, t, 1), matmul(h, dir.w_h));
    const auto gate = [&](LstmGate g) { return slice_cols(z, static_cast<std::size_t>(g) * hidden, hidden); };
    const auto i = sigmoid(gate(LstmGate::kInput));
    const auto f = sigmoid(gate(LstmGate::kForget));
    const auto o = sigmoid(gate(LstmGate::kOutput));
    const auto g = tanh(gate(LstmGate::kCandidate));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh(c));
    states[t] = h;
  }
  return concat(std::span<const BasicTensor<T>>(states), 0);
}

template <typename T>
BasicTensor<T> bilstm_forward(const BasicTensor<T>& x, const BiLSTMParams<T>& p) {
  if (x.rank() != 2 || x.cols() != p.input_dim) {
    fail(ErrorKind::kArgument, "bilstm: input " + shape_string(x.shape()) + " does not match input dim " +
                                   std::to_string(p.input_dim));
  }
  const BasicTensor<T> parts[] = {lstm_forward(x, p.fwd, p.hidden, false), lstm_forward(x, p.bwd, p.hidden, true)};
  return concat(std::span<const BasicTensor<T>>(parts), 1);
}

#define TCGAT_INSTANTIATE_ENCODER(T)                                                                    \
  template BasicTensor<T> embed_learned(const BasicTensor<T>&, const Vocabulary&, const AnnotatedSentence&); \
  template BasicTensor<T> embed_external(const EmbeddingTable&, const AnnotatedSentence&, std::size_t); \
  template struct BiLSTMParams<T>;                                                                      \
  template BasicTensor<T> lstm_forward(const BasicTensor<T>&, const LstmDirection<T>&, std::size_t, bool); \
  template BasicTensor<T> bilstm_forward(const BasicTensor<T>&, const BiLSTMParams<T>&);

TCGAT_INSTANTIATE_ENCODER(float)
TCGAT_INSTANTIATE_ENCODER(double)

#undef TCGAT_INSTANTIATE_ENCODER

}  // namespace tcgat
