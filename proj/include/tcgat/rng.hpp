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

#include <cstdint>
#include <initializer_list>

namespace tcgat {

/// Stateless counter-based generator. Every draw is a pure function of
/// (seed, stream, counter), so results do not depend on call order, thread
/// interleaving, or the platform's <random> implementation.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  [[nodiscard]] constexpr std::uint64_t seed() const { return seed_; }
  [[nodiscard]] constexpr std::uint64_t stream() const { return stream_; }

  /// A generator for an independent sub-stream identified by `tags`.
  [[nodiscard]] constexpr CounterRng derive(std::initializer_list<std::uint64_t> tags) const {
    std::uint64_t s = stream_;
    for (auto t : tags) s = mix(s ^ mix(t + 0x9e3779b97f4a7c15ULL));
    return CounterRng(seed_, s);
  }

  [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix(mix(seed_ ^ 0x243f6a8885a308d3ULL) ^ mix(stream_ + 0x13198a2e03707344ULL) ^
               (counter * 0x9e3779b97f4a7c15ULL));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  [[nodiscard]] constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  [[nodiscard]] constexpr double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  /// Uniform integer in [0, n). n must be > 0.
  [[nodiscard]] constexpr std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    return static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(n)) % n;
  }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace tcgat
