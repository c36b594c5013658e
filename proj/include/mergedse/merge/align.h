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

#ifndef MERGEDSE_MERGE_ALIGN_H_
#define MERGEDSE_MERGE_ALIGN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mergedse/ir/module.h"
#include "mergedse/ir/types.h"

namespace mergedse::merge {

// Position of an instruction inside its function.
struct InstrRef {
  int block = 0;
  int index = 0;
  bool operator==(const InstrRef&) const = default;
};

// Block order: a depth-first reverse post-order from the entry. Seed 0
// keeps each terminator's listed successor order; bit k of the seed swaps
// the successors of the k-th two-way branch reached by the search.
// Unreachable blocks follow in index order.
std::vector<int> BlockOrder(const ir::Function& f, uint64_t seed);

// All instructions, block by block in BlockOrder.
std::vector<InstrRef> Linearize(const ir::Function& f, uint64_t seed);

struct AlignEntry {
  enum class Kind : uint8_t { kAligned, kGap1, kGap2 };
  Kind kind = Kind::kAligned;
  int i1 = -1;  // position in the first sequence (kAligned, kGap2)
  int i2 = -1;  // position in the second sequence (kAligned, kGap1)
  bool operator==(const AlignEntry&) const = default;

  static AlignEntry Aligned(int a, int b) { return {Kind::kAligned, a, b}; }
  // kGap1: an instruction of the second sequence facing a gap in the first.
  static AlignEntry Gap1(int b) { return {Kind::kGap1, -1, b}; }
  // kGap2: an instruction of the first sequence facing a gap in the second.
  static AlignEntry Gap2(int a) { return {Kind::kGap2, a, -1}; }
};

struct Alignment {
  std::vector<AlignEntry> entries;
  double score = 0.0;
  int len1 = 0;
  int len2 = 0;

  int AlignedCount() const;
  int GapCount() const;
  // 2 * |aligned| / (len1 + len2); 0 for two empty sequences.
  double AlignedFraction() const;
};

struct AlignWeights {
  ir::PerOpcode<double> match{};
  double gap = 0.1;

  // 4.0 for call, load, store, mul and the division family, 1.0 otherwise.
  static AlignWeights Default();
};

// Match score for aligning positions (i, j), or nullopt when they may not
// be aligned.
using MatchFn = std::function<std::optional<double>(int, int)>;

// Global alignment by the Needleman-Wunsch recurrence, maximizing the sum of
// match scores minus gap * (number of gaps). Ties prefer a match, then a
// gap in the second sequence. Score is recomputed from the entries.
Alignment AlignSequences(int len1, int len2, const MatchFn& match, double gap);

// Whether two instructions can become one merged instruction: same opcode,
// predicate, types, callee, arity and operand types; const and alloca
// additionally need identical operands.
bool Compatible(const ir::Function& f1, const ir::Instruction& a, const ir::Function& f2,
                const ir::Instruction& b, const ir::Module* m);

// Aligns two linearizations of f1 and f2.
Alignment AlignFunctions(const ir::Function& f1, const std::vector<InstrRef>& s1,
                         const ir::Function& f2, const std::vector<InstrRef>& s2,
                         const AlignWeights& w, const ir::Module* m = nullptr);

// The type an operand has at its position (register type, or the type the
// position requires for a literal). kVoid if unknown without the module.
ir::TypeTag OperandType(const ir::Function& f, const ir::Instruction& inst, std::size_t k,
                        const ir::Module* m);

}  // namespace mergedse::merge

#endif  // MERGEDSE_MERGE_ALIGN_H_
