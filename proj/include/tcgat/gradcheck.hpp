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
#include <string>
#include <vector>

namespace tcgat {

/// Maximum relative error tolerated between reverse-mode and finite-difference
/// gradients.
inline constexpr double kGradCheckTolerance = 1e-4;

struct GradCheckCase {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  bool passed = false;
};

struct GradCheckSuite {
  std::vector<GradCheckCase> cases;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] double max_rel_error() const;
  [[nodiscard]] std::string to_text() const;
};

/// Runs central-difference checks (float64 instantiation) over every tensor
/// primitive and each composed layer: BiLSTM, T-GAT in both mask modes,
/// C-GAT, equilibrium + classifier + loss, and a reduced full model.
GradCheckSuite run_grad_check_suite(std::uint64_t seed = 0);

}  // namespace tcgat
