// Copyright 2026 The MergeDSE Authors
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

#ifndef MERGEDSE_MERGE_VERIFY_H_
#define MERGEDSE_MERGE_VERIFY_H_

#include <cstdint>
#include <optional>
#include <string>

#include "mergedse/ir/heap.h"
#include "mergedse/ir/module.h"
#include "mergedse/ir/random_inputs.h"

namespace mergedse::merge {

struct Counterexample {
  int side = 1;  // 1: f_sel = 1 against f1, 2: f_sel = 0 against f2
  ir::Invocation parent_input;
  ir::Invocation merged_input;
  std::string expected;
  std::string actual;
};

struct VerifyReport {
  bool passed = true;
  int compared = 0;      // trials whose outcomes were compared, both sides
  int inconclusive = 0;  // parent ran out of fuel, nothing to compare
  std::optional<Counterexample> counterexample;
};

struct VerifyOptions {
  int trials = 200;  // per side
  uint64_t seed = 1;
  uint64_t fuel = 1'000'000;
  // The merged body executes selects and dispatch on top of the parent's
  // work; it gets this multiple of the parent's fuel.
  uint64_t merged_fuel_factor = 8;
  ir::RandomInputOptions inputs{};
};

// Differential interpretation of f12 against each parent on random inputs.
// Outcomes (trap kind, or return bits plus heap image) must match exactly.
// The parameter mapping is recomputed from the parents' signatures.
VerifyReport VerifyMerge(const ir::Module& m, const std::string& f1, const std::string& f2,
                         const std::string& f12, const VerifyOptions& opts = {});

}  // namespace mergedse::merge

#endif  // MERGEDSE_MERGE_VERIFY_H_
