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

#include "mergedse/merge/verify.h"

#include <random>

#include "mergedse/ir/interpreter.h"
#include "mergedse/merge/merger.h"

namespace mergedse::merge {

VerifyReport VerifyMerge(const ir::Module& m, const std::string& n1, const std::string& n2,
                         const std::string& n12, const VerifyOptions& opts) {
  VerifyReport rep;
  const ir::Function* parents[2] = {m.Find(n1), m.Find(n2)};
  const ir::Function* merged = m.Find(n12);
  if (!parents[0] || !parents[1] || !merged) {
    rep.passed = false;
    return rep;
  }
  ParamMap pm = MergeParameters(*parents[0], *parents[1]);
  std::mt19937_64 rng(opts.seed);
  for (int side = 1; side <= 2; ++side) {
    const ir::Function& parent = *parents[side - 1];
    CallAdapter adapter = CallAdapter::ForSide(*parents[0], *parents[1], pm, side);
    for (int t = 0; t < opts.trials; ++t) {
      ir::RandomInputOptions in = opts.inputs;
      in.fill_doubles = t % 2 == 1;
      ir::Invocation inv = ir::RandomInvocation(parent, rng, in);
      ir::Invocation minv = adapter.Apply(inv);
      ir::Outcome want = ir::RunForOutcome(m, parent.name, inv, opts.fuel);
      if (want.trap == ir::TrapKind::kFuelExhausted) {
        ++rep.inconclusive;
        continue;
      }
      ir::Outcome got = ir::RunForOutcome(m, n12, minv, opts.fuel * opts.merged_fuel_factor);
      ++rep.compared;
      if (want != got) {
        rep.passed = false;
        rep.counterexample = Counterexample{side, inv, minv, want.ToString(parent.return_type),
                                            got.ToString(merged->return_type)};
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace mergedse::merge
