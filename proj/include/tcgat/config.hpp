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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "tcgat/corpus.hpp"
#include "tcgat/tensor.hpp"

namespace tcgat {

/// Model variants; each maps to one ablation row.
enum class Variant {
  kFull,           // both graph branches, context branch, equilibrium gate
  kNoContext,      // graph branches only (gate fixed at 1)
  kNoEquilibrium,  // projected branches summed, no gate
  kTGATOnly,       // C-GAT slice zeroed at the fuse input
  kCGATOnly,       // T-GAT slice zeroed at the fuse input
  kContextOnly,    // context branch only (gate fixed at 0)
};

inline constexpr std::array<Variant, 6> kAllVariants = {Variant::kFull,     Variant::kNoContext,
                                                        Variant::kNoEquilibrium, Variant::kTGATOnly,
                                                        Variant::kCGATOnly, Variant::kContextOnly};

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

std::string_view mask_mode_name(MaskMode mode);
MaskMode parse_mask_mode(std::string_view name);

struct TrainConfig {
  std::size_t max_len = kDefaultMaxLen;
  std::size_t batch_size = 24;
  double lr = 1e-3;
  std::size_t embed_dim = 300;
  std::size_t bilstm_hidden = 150;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  /// Early stop after this many epochs without improving the best mean loss
  /// by more than plateau_tolerance (relative). 0 disables early stopping.
  std::size_t patience = 5;
  double plateau_tolerance = 1e-4;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
  Variant variant = Variant::kFull;

  std::size_t tgat_dim = 100;
  std::size_t tgat_heads = 3;
  double tgat_dropout = 0.15;
  double tgat_leaky_slope = kDefaultLeakySlope;
  MaskMode mask_mode = MaskMode::kRenormalize;

  std::size_t cgat_dim = 100;
  std::size_t cgat_heads = 3;
  double cgat_dropout = 0.15;
  double cgat_leaky_slope = kDefaultLeakySlope;

  std::size_t fuse_dim = 300;
  double train_fraction = 2.0 / 3.0;

  /// Applies one `key = value` setting; unknown keys and bad values throw
  /// Error(kValidation).
  void set(std::string_view key, std::string_view value);
  /// Throws Error(kValidation) unless every size/rate is in range.
  void validate() const;
  /// All keys with their current values, in canonical form.
  [[nodiscard]] std::map<std::string, std::string> to_map() const;

  /// Parses flat `key = value` text; '#' starts a comment.
  static TrainConfig parse(std::string_view text);
  static TrainConfig load(const std::filesystem::path& path);
};

}  // namespace tcgat
