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

// TCCKPT1: versioned container of named float32 tensors.
//
//   "TCCKPT1"                      7 bytes
//   u32 entry count
//   per entry: u16 name length, name bytes, u8 rank, rank x u32 dims,
//              numel x float32 (row-major)
//   u32 CRC32 of every preceding byte
//
// All integers little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcgat/tensor.hpp"

namespace tcgat {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

std::vector<std::uint8_t> encode_checkpoint(const NamedTensors& tensors);
/// Verifies magic, structure, exact length and CRC. Tensors come back as
/// parameter leaves in file order.
NamedTensors decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const NamedTensors& tensors);
NamedTensors load_checkpoint(const std::filesystem::path& path);

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace tcgat
