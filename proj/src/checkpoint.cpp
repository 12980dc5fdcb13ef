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
#include "tcgat/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>

#include "tcgat/error.hpp"

namespace tcgat {

namespace {

constexpr char kMagic[] = {'T', 'C', 'C', 'K', 'P', 'T', '1'};

template <typename U>
void put(std::vector<std::uint8_t>& out, U v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(U));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  template <typename U>
  U get() {
    U v{};
    take(&v, sizeof(U));
    return v;
  }
  void take(void* dst, std::size_t n) {
    if (n > bytes_.size() - pos_) fail(ErrorKind::kIo, "checkpoint truncated at byte " + std::to_string(pos_));
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  constexpr std::size_t kChunk = std::numeric_limits<uInt>::max();
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const auto n = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_checkpoint(const NamedTensors& tensors) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    if (name.empty() || name.size() > 0xffff) fail(ErrorKind::kArgument, "checkpoint: bad tensor name length");
    if (t.rank() > 0xff) fail(ErrorKind::kArgument, "checkpoint: rank too large for " + name);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
    for (auto d : t.shape()) {
      if (d > 0xffffffffULL) fail(ErrorKind::kArgument, "checkpoint: dimension too large for " + name);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    }
    const auto data = t.data();
    const auto* p = reinterpret_cast<const std::uint8_t*>(data.data());
    out.insert(out.end(), p, p + data.size_bytes());
  }
  put<std::uint32_t>(out, crc32_of(out));
  return out;
}

NamedTensors decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorKind::kIo, "not a TCCKPT1 checkpoint");
  }
  const auto body = bytes.first(bytes.size() - 4);
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + body.size(), 4);
  if (crc32_of(body) != stored) fail(ErrorKind::kIo, "checkpoint CRC mismatch");

  Reader in(body.subspan(sizeof(kMagic)));
  const auto count = in.get<std::uint32_t>();
  NamedTensors out;
  std::set<std::string> seen;
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name(in.get<std::uint16_t>(), '\0');
    in.take(name.data(), name.size());
    if (!seen.insert(name).second) fail(ErrorKind::kIo, "checkpoint repeats tensor \"" + name + "\"");
    Shape shape(in.get<std::uint8_t>());
    for (auto& d : shape) d = in.get<std::uint32_t>();
    const auto n = shape_numel(shape);
    if (n * sizeof(float) > in.remaining()) fail(ErrorKind::kIo, "checkpoint truncated in tensor \"" + name + "\"");
    std::vector<float> values(n);
    in.take(values.data(), n * sizeof(float));
    out.emplace_back(std::move(name), Tensor::parameter(std::move(shape), std::move(values)));
  }
  if (in.remaining() != 0) fail(ErrorKind::kIo, "checkpoint has trailing bytes before its CRC");
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const NamedTensors& tensors) {
  const auto bytes = encode_checkpoint(tensors);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

NamedTensors load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace tcgat
