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
#include "tcgat/metrics.hpp"

using namespace tcgat;

namespace {

// Half-up rounding to four decimals; the offset absorbs binary representation
// error of values that sit exactly on a half.
double round4(double x) { return std::floor(x * 1e4 + 0.5 + 1e-9) / 1e4; }

}  // namespace

TEST_CASE("macro F1 is the mean of the cause and effect F1") {
  CHECK(round4(macro_f1(0.9043, 0.8951)) == 0.8997);
  CHECK(round4(macro_f1(0.8938, 0.9255)) == 0.9097);
  CHECK(macro_f1(0.5, 1.0) == 0.75);
}

TEST_CASE("f1 score") {
  CHECK(f1_score(0.0, 0.0) == 0.0);
  CHECK(f1_score(1.0, 1.0) == 1.0);
  CHECK(f1_score(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("hand-counted confusion") {
  Confusion c;
  for (int k = 0; k < 3; ++k) c.add(CausalTag::kC, CausalTag::kC);
  c.add(CausalTag::kC, CausalTag::kO);
  c.add(CausalTag::kO, CausalTag::kC);
  c.add(CausalTag::kE, CausalTag::kE);
  const auto m = class_metrics(c, CausalTag::kC);
  CHECK(m.precision == 0.75);
  CHECK(m.recall == 0.75);
  CHECK(m.f1 == 0.75);
  CHECK(m.support == 4);
  CHECK(m.predicted == 4);
  const auto r = EvalReport::from_confusion(c, 2);
  CHECK(r.effect.f1 == 1.0);
  CHECK(r.macro_f1 == doctest::Approx(0.875));
}

TEST_CASE("absent class is flagged and scored zero") {
  Confusion c;
  c.add(CausalTag::kO, CausalTag::kO);
  c.add(CausalTag::kC, CausalTag::kC);
  const auto r = EvalReport::from_confusion(c, 1);
  CHECK(r.effect.absent);
  CHECK(r.effect.f1 == 0.0);
  CHECK_FALSE(r.cause.absent);
  CHECK(r.macro_f1 == 0.5);
  CHECK(r.to_table().find("(absent)") != std::string::npos);
}

TEST_CASE("confusion accumulates over spans") {
  const std::vector<CausalTag> gold{CausalTag::kO, CausalTag::kC, CausalTag::kE};
  const std::vector<CausalTag> pred{CausalTag::kO, CausalTag::kE, CausalTag::kE};
  Confusion a, b;
  a.add(gold, pred);
  b.add(gold, pred);
  a += b;
  CHECK(a.total() == 6);
  CHECK(a.counts[1][2] == 2);
}

TEST_CASE("report renderings") {
  Confusion c;
  c.add(CausalTag::kC, CausalTag::kC);
  c.add(CausalTag::kE, CausalTag::kO);
  const auto r = EvalReport::from_confusion(c, 1);
  const auto table = r.to_table();
  CHECK(table.find("macro") != std::string::npos);
  CHECK(table.find("0.5000") != std::string::npos);
  const auto json = r.to_json();
  CHECK(json.find("\"macro_f1\": 0.5") != std::string::npos);
  CHECK(json.find("\"confusion\"") != std::string::npos);
}
