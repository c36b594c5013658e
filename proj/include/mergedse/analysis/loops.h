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

#ifndef MERGEDSE_ANALYSIS_LOOPS_H_
#define MERGEDSE_ANALYSIS_LOOPS_H_

#include <set>
#include <vector>

#include "mergedse/ir/module.h"

namespace mergedse::analysis {

// Immediate dominators by block index. idom[0] == 0; unreachable blocks
// get -1.
std::vector<int> ImmediateDominators(const ir::Function& f);
bool Dominates(const std::vector<int>& idom, int a, int b);

std::vector<std::vector<int>> Successors(const ir::Function& f);
std::vector<std::vector<int>> Predecessors(const ir::Function& f);

struct Loop {
  int header = -1;
  std::set<int> blocks;  // includes the header
  int depth = 1;         // 1 for outermost
  int parent = -1;       // index into LoopForest::loops
};

struct LoopForest {
  // Outer loops precede the loops nested in them; siblings are ordered by
  // header block index.
  std::vector<Loop> loops;
  // A cycle entered other than through a dominating header was found. The
  // loops listed are still the natural loops, but the function must not be
  // transformed.
  bool irreducible = false;
};

LoopForest NaturalLoops(const ir::Function& f);

// Backward register liveness, per block entry.
std::vector<std::set<int>> LiveIn(const ir::Function& f);

}  // namespace mergedse::analysis

#endif  // MERGEDSE_ANALYSIS_LOOPS_H_
