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

#ifndef MERGEDSE_MERGE_MERGER_H_
#define MERGEDSE_MERGE_MERGER_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mergedse/ir/heap.h"
#include "mergedse/ir/module.h"
#include "mergedse/merge/align.h"

namespace mergedse::merge {

// Parameter positions, not register ids.
struct ParamMap {
  std::vector<std::pair<int, int>> matched;
  std::vector<int> unmatched1;
  std::vector<int> unmatched2;
  bool operator==(const ParamMap&) const = default;
};

// Walks f1's parameters in order and matches each with the next parameter
// of the same type in f2, searching only past the previous match so the
// matching keeps declaration order on both sides.
ParamMap MergeParameters(const ir::Function& f1, const ir::Function& f2);

// Instructions the merge added on top of the two bodies.
struct MergeOverhead {
  int selects = 0;      // operand selects and condition negations
  int glue = 0;         // added jmp/br, including f_sel dispatch
  int init_consts = 0;  // zero-initialization of registers
  int Total() const { return selects + glue + init_consts; }
};

struct MergedFunction {
  ir::Function function;  // provenance kMerged, parents {f1, f2}
  ParamMap params;
  Alignment alignment;  // after un-aligning register conflicts
  MergeOverhead overhead;
  // size(f1) + size(f2) - aligned pairs.
  int non_glue = 0;
};

struct MergeOptions {
  AlignWeights weights = AlignWeights::Default();
  int seeds = 4;  // linearizations of f2 tried against f1's seed-0 order
  double min_aligned_fraction = 0.05;
};

struct MergeResult {
  std::optional<MergedFunction> merged;
  std::string diagnostic;  // why the pair was rejected
  Alignment alignment;     // best alignment found, also on rejection
};

// Generates the merged body for a given alignment of Linearize(f1, 0) and
// Linearize(f2, seed2). `m` resolves call signatures and validates the
// result; the merged function is named `name`.
MergeResult MergeFunctions(const ir::Module& m, const ir::Function& f1, const ir::Function& f2,
                           uint64_t seed2, const Alignment& alignment, const ParamMap& params,
                           const std::string& name, const MergeOptions& opts = {});

// Samples linearizations, keeps the best-scoring alignment (first on ties)
// and merges. Rejects pairs with different return types, pairs where one
// function (transitively) calls the other, and alignments below the
// threshold.
MergeResult MergePair(const ir::Module& m, const std::string& f1, const std::string& f2,
                      const std::string& name, const MergeOptions& opts = {});

// Default merged name: "<f1>__<f2>".
std::string MergedName(const std::string& f1, const std::string& f2);

// Rewrites calls to a parent function into calls to a merged function.
// Each merged parameter is fed from a parent parameter or a neutral
// literal, and f_sel is fixed.
class CallAdapter {
 public:
  struct Source {
    int parent_param = -1;  // -1: neutral literal
    ir::TypeTag type = ir::TypeTag::kVoid;
  };

  // side 1 selects f1 behaviour (f_sel = 1).
  static CallAdapter ForSide(const ir::Function& parent1, const ir::Function& parent2,
                             const ParamMap& params, int side);
  // Adapter for calling `outer` (merged from inner's function and another)
  // after this adapter.
  CallAdapter Then(const CallAdapter& outer) const;

  const std::vector<Source>& sources() const { return sources_; }
  std::vector<ir::Operand> Apply(const std::vector<ir::Operand>& parent_args) const;
  ir::Invocation Apply(const ir::Invocation& parent_call) const;

 private:
  std::vector<Source> sources_;
  std::vector<ir::Literal> fixed_;  // value when parent_param == -1
};

ir::Literal NeutralLiteral(ir::TypeTag t);

}  // namespace mergedse::merge

#endif  // MERGEDSE_MERGE_MERGER_H_
