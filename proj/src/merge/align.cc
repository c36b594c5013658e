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

#include "mergedse/merge/align.h"

#include <algorithm>
#include <limits>

namespace mergedse::merge {

std::vector<int> BlockOrder(const ir::Function& f, uint64_t seed) {
  const int n = static_cast<int>(f.blocks.size());
  std::vector<int> post;
  std::vector<char> seen(n, 0);
  int branch_no = 0;
  // Frames hold the successors still to visit, last one first.
  std::vector<std::pair<int, std::vector<int>>> stack;
  auto push = [&](int b) {
    seen[b] = 1;
    std::vector<int> succ;
    if (!f.blocks[b].instrs.empty()) succ = f.blocks[b].instrs.back().targets;
    if (succ.size() == 2 && succ[0] != succ[1]) {
      if (branch_no < 64 && ((seed >> branch_no) & 1)) std::swap(succ[0], succ[1]);
      ++branch_no;
    }
    std::reverse(succ.begin(), succ.end());
    stack.push_back({b, std::move(succ)});
  };
  if (n > 0) push(0);
  while (!stack.empty()) {
    auto& [b, todo] = stack.back();
    if (todo.empty()) {
      post.push_back(b);
      stack.pop_back();
      continue;
    }
    // Visiting the last listed successor first makes the first listed one
    // come first in reverse post-order.
    int t = todo.front();
    todo.erase(todo.begin());
    if (!seen[t]) push(t);
  }
  std::reverse(post.begin(), post.end());
  for (int b = 0; b < n; ++b) {
    if (!seen[b]) post.push_back(b);
  }
  return post;
}

std::vector<InstrRef> Linearize(const ir::Function& f, uint64_t seed) {
  std::vector<InstrRef> out;
  for (int b : BlockOrder(f, seed)) {
    for (int i = 0; i < static_cast<int>(f.blocks[b].instrs.size()); ++i) out.push_back({b, i});
  }
  return out;
}

int Alignment::AlignedCount() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const AlignEntry& e) {
    return e.kind == AlignEntry::Kind::kAligned;
  }));
}

int Alignment::GapCount() const { return static_cast<int>(entries.size()) - AlignedCount(); }

double Alignment::AlignedFraction() const {
  if (len1 + len2 == 0) return 0.0;
  return 2.0 * AlignedCount() / (len1 + len2);
}

AlignWeights AlignWeights::Default() {
  AlignWeights w;
  w.match.fill(1.0);
  for (ir::Opcode op : {ir::Opcode::kCall, ir::Opcode::kLoad, ir::Opcode::kStore, ir::Opcode::kMul,
                        ir::Opcode::kSDiv, ir::Opcode::kSRem, ir::Opcode::kFMul, ir::Opcode::kFDiv}) {
    w.match[ir::OpIndex(op)] = 4.0;
  }
  w.gap = 0.1;
  return w;
}

Alignment AlignSequences(int len1, int len2, const MatchFn& match, double gap) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const int w = len2 + 1;
  std::vector<double> dp(static_cast<std::size_t>(len1 + 1) * w, kNegInf);
  std::vector<double> ms(static_cast<std::size_t>(len1 + 1) * w, kNegInf);
  auto at = [&](int i, int j) -> double& { return dp[static_cast<std::size_t>(i) * w + j]; };
  at(0, 0) = 0.0;
  for (int i = 1; i <= len1; ++i) at(i, 0) = at(i - 1, 0) - gap;
  for (int j = 1; j <= len2; ++j) at(0, j) = at(0, j - 1) - gap;
  for (int i = 1; i <= len1; ++i) {
    for (int j = 1; j <= len2; ++j) {
      double best = std::max(at(i - 1, j) - gap, at(i, j - 1) - gap);
      if (auto s = match(i - 1, j - 1)) {
        ms[static_cast<std::size_t>(i) * w + j] = *s;
        best = std::max(best, at(i - 1, j - 1) + *s);
      }
      at(i, j) = best;
    }
  }
  Alignment a;
  a.len1 = len1;
  a.len2 = len2;
  int i = len1, j = len2;
  while (i > 0 || j > 0) {
    double here = at(i, j);
    double m = (i > 0 && j > 0) ? ms[static_cast<std::size_t>(i) * w + j] : kNegInf;
    if (m != kNegInf && at(i - 1, j - 1) + m == here) {
      a.entries.push_back(AlignEntry::Aligned(i - 1, j - 1));
      --i, --j;
    } else if (i > 0 && at(i - 1, j) - gap == here) {
      a.entries.push_back(AlignEntry::Gap2(i - 1));
      --i;
    } else {
      a.entries.push_back(AlignEntry::Gap1(j - 1));
      --j;
    }
  }
  std::reverse(a.entries.begin(), a.entries.end());
  double matched = 0.0;
  for (const auto& e : a.entries) {
    if (e.kind == AlignEntry::Kind::kAligned) matched += *match(e.i1, e.i2);
  }
  a.score = matched - gap * a.GapCount();
  return a;
}

ir::TypeTag OperandType(const ir::Function& f, const ir::Instruction& inst, std::size_t k,
                        const ir::Module* m) {
  using ir::Opcode;
  using ir::TypeTag;
  const ir::Operand& o = inst.operands[k];
  if (o.is_reg()) return f.registers[o.reg].type;
  switch (inst.op) {
    case Opcode::kSelect:
      return k == 0 ? TypeTag::kI1 : inst.type;
    case Opcode::kLoad:
      return TypeTag::kPtr;
    case Opcode::kStore:
      return k == 0 ? inst.type : TypeTag::kPtr;
    case Opcode::kGep:
      return k == 0 ? TypeTag::kPtr : TypeTag::kI64;
    case Opcode::kAlloca:
      return TypeTag::kI64;
    case Opcode::kBr:
      return TypeTag::kI1;
    case Opcode::kCall: {
      const ir::Function* callee = m ? m->Find(inst.callee) : nullptr;
      return callee && k < callee->params.size() ? callee->ParamType(k) : TypeTag::kVoid;
    }
    default:
      return inst.type;  // arithmetic, compares, casts, const, ret
  }
}

bool Compatible(const ir::Function& f1, const ir::Instruction& a, const ir::Function& f2,
                const ir::Instruction& b, const ir::Module* m) {
  if (a.op != b.op || a.pred != b.pred || a.type != b.type || a.cast_to != b.cast_to ||
      a.callee != b.callee || a.operands.size() != b.operands.size() ||
      (a.result >= 0) != (b.result >= 0) || a.targets.size() != b.targets.size()) {
    return false;
  }
  if (a.op == ir::Opcode::kConst || a.op == ir::Opcode::kAlloca) return a.operands == b.operands;
  for (std::size_t k = 0; k < a.operands.size(); ++k) {
    ir::TypeTag ta = OperandType(f1, a, k, m), tb = OperandType(f2, b, k, m);
    if (ta != tb) return false;
  }
  return true;
}

Alignment AlignFunctions(const ir::Function& f1, const std::vector<InstrRef>& s1,
                         const ir::Function& f2, const std::vector<InstrRef>& s2,
                         const AlignWeights& w, const ir::Module* m) {
  auto inst1 = [&](int i) -> const ir::Instruction& {
    return f1.blocks[s1[i].block].instrs[s1[i].index];
  };
  auto inst2 = [&](int j) -> const ir::Instruction& {
    return f2.blocks[s2[j].block].instrs[s2[j].index];
  };
  // Compatibility is the expensive part of the recurrence; compute it once.
  const int n1 = static_cast<int>(s1.size()), n2 = static_cast<int>(s2.size());
  std::vector<char> ok(static_cast<std::size_t>(n1) * n2, 0);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const auto& a = inst1(i);
      const auto& b = inst2(j);
      ok[static_cast<std::size_t>(i) * n2 + j] = a.op == b.op && Compatible(f1, a, f2, b, m);
    }
  }
  return AlignSequences(
      n1, n2,
      [&](int i, int j) -> std::optional<double> {
        if (!ok[static_cast<std::size_t>(i) * n2 + j]) return std::nullopt;
        return w.match[ir::OpIndex(inst1(i).op)];
      },
      w.gap);
}

}  // namespace mergedse::merge
