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

#include "mergedse/ir/validator.h"

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "fmt/core.h"

namespace mergedse::ir {
namespace {

int IntWidth(TypeTag t) {
  switch (t) {
    case TypeTag::kI1:
      return 1;
    case TypeTag::kI32:
      return 32;
    case TypeTag::kI64:
      return 64;
    default:
      return 0;
  }
}

bool LiteralFits(const Literal& l, TypeTag t) {
  switch (l.kind) {
    case Literal::Kind::kBool:
      return t == TypeTag::kI1;
    case Literal::Kind::kFloat:
      return t == TypeTag::kF64;
    case Literal::Kind::kInt:
      switch (t) {
        case TypeTag::kI1:
          return l.int_value == 0 || l.int_value == 1;
        case TypeTag::kI32:
          return l.int_value >= std::numeric_limits<int32_t>::min() &&
                 l.int_value <= std::numeric_limits<int32_t>::max();
        case TypeTag::kI64:
        case TypeTag::kF64:
          return true;
        case TypeTag::kPtr:
          return l.int_value == 0;
        default:
          return false;
      }
  }
  return false;
}

class FunctionChecker {
 public:
  FunctionChecker(const Function& f, const Module& m) : f_(f), m_(m) {}

  std::vector<Diagnostic> Run() {
    if (f_.blocks.empty()) {
      Report(-1, -1, "function has no blocks");
      return diags_;
    }
    for (int p : f_.params) {
      if (f_.registers[p].type == TypeTag::kVoid) {
        Report(-1, -1, fmt::format("parameter %{} has void type", f_.registers[p].name));
      }
    }
    std::set<std::string> labels;
    for (int b = 0; b < static_cast<int>(f_.blocks.size()); ++b) {
      const BasicBlock& bb = f_.blocks[b];
      if (!labels.insert(bb.label).second) {
        Report(b, -1, fmt::format("duplicate block label {}", bb.label));
      }
      if (bb.instrs.empty() || !IsTerminator(bb.instrs.back().op)) {
        Report(b, -1, fmt::format("block {} does not end in a terminator", bb.label));
      }
      for (int i = 0; i < static_cast<int>(bb.instrs.size()); ++i) {
        const Instruction& inst = bb.instrs[i];
        if (IsTerminator(inst.op) && i + 1 != static_cast<int>(bb.instrs.size())) {
          Report(b, i, fmt::format("terminator '{}' in the middle of block {}",
                                   OpcodeName(inst.op), bb.label));
        }
        CheckInstruction(b, i, inst);
      }
    }
    if (diags_.empty()) CheckEntryHasNoPredecessors();
    if (diags_.empty()) CheckDefiniteAssignment();
    return diags_;
  }

 private:
  void Report(int block, int instr, std::string msg) {
    Diagnostic d;
    d.message = std::move(msg);
    d.function = f_.name;
    d.block = block;
    d.instr = instr;
    diags_.push_back(std::move(d));
  }

  bool ValidReg(int r) const {
    return r >= 0 && r < static_cast<int>(f_.registers.size());
  }

  // Checks operand k against an expected type; kVoid accepts any
  // non-void register.
  void Expect(int b, int i, const Instruction& inst, std::size_t k, TypeTag t) {
    if (k >= inst.operands.size()) return;
    const Operand& o = inst.operands[k];
    if (o.is_reg()) {
      if (!ValidReg(o.reg)) {
        Report(b, i, "operand refers to an unknown register");
        return;
      }
      TypeTag rt = f_.registers[o.reg].type;
      if (rt == TypeTag::kVoid) return;  // reported by definite assignment
      if (t != TypeTag::kVoid && rt != t) {
        Report(b, i, fmt::format("type mismatch: %{} is {} but {} expects {}",
                                 f_.registers[o.reg].name, TypeName(rt),
                                 OpcodeName(inst.op), TypeName(t)));
      }
    } else if (t != TypeTag::kVoid && !LiteralFits(o.imm, t)) {
      Report(b, i, fmt::format("literal {} is not a valid {}",
                               o.imm.kind == Literal::Kind::kFloat
                                   ? fmt::format("{}", o.imm.float_value)
                                   : fmt::format("{}", o.imm.int_value),
                               TypeName(t)));
    }
  }

  TypeTag OperandType(const Operand& o) const {
    if (o.is_reg()) return ValidReg(o.reg) ? f_.registers[o.reg].type : TypeTag::kVoid;
    return TypeTag::kVoid;
  }

  void Arity(int b, int i, const Instruction& inst, std::size_t n) {
    if (inst.operands.size() != n) {
      Report(b, i, fmt::format("'{}' expects {} operand(s), has {}", OpcodeName(inst.op), n,
                               inst.operands.size()));
    }
  }

  void Targets(int b, int i, const Instruction& inst, std::size_t n) {
    if (inst.targets.size() != n) {
      Report(b, i, fmt::format("'{}' expects {} successor(s)", OpcodeName(inst.op), n));
      return;
    }
    for (int t : inst.targets) {
      if (t < 0 || t >= static_cast<int>(f_.blocks.size())) {
        Report(b, i, "branch to an undefined label");
      }
    }
  }

  void CheckInstruction(int b, int i, const Instruction& inst) {
    const TypeTag ty = inst.type;
    switch (inst.op) {
      case Opcode::kAdd:
      case Opcode::kSub:
      case Opcode::kMul:
      case Opcode::kSDiv:
      case Opcode::kSRem:
      case Opcode::kAnd:
      case Opcode::kOr:
      case Opcode::kXor:
      case Opcode::kShl:
      case Opcode::kAShr:
        if (!IsIntegerType(ty)) Report(b, i, fmt::format("'{}' needs an integer type", OpcodeName(inst.op)));
        Arity(b, i, inst, 2);
        Expect(b, i, inst, 0, ty);
        Expect(b, i, inst, 1, ty);
        break;
      case Opcode::kFAdd:
      case Opcode::kFSub:
      case Opcode::kFMul:
      case Opcode::kFDiv:
        if (ty != TypeTag::kF64) Report(b, i, fmt::format("'{}' needs type f64", OpcodeName(inst.op)));
        Arity(b, i, inst, 2);
        Expect(b, i, inst, 0, ty);
        Expect(b, i, inst, 1, ty);
        break;
      case Opcode::kICmp:
        if (!IsIntegerType(ty) && ty != TypeTag::kPtr) Report(b, i, "icmp needs an integer or ptr type");
        if (!IsIntPredicate(inst.pred)) Report(b, i, "icmp needs an integer predicate");
        Arity(b, i, inst, 2);
        Expect(b, i, inst, 0, ty);
        Expect(b, i, inst, 1, ty);
        break;
      case Opcode::kFCmp:
        if (ty != TypeTag::kF64) Report(b, i, "fcmp needs type f64");
        if (!IsFloatPredicate(inst.pred)) Report(b, i, "fcmp needs an ordered float predicate");
        Arity(b, i, inst, 2);
        Expect(b, i, inst, 0, ty);
        Expect(b, i, inst, 1, ty);
        break;
      case Opcode::kSelect:
        if (ty == TypeTag::kVoid) Report(b, i, "select needs a value type");
        Arity(b, i, inst, 3);
        Expect(b, i, inst, 0, TypeTag::kI1);
        Expect(b, i, inst, 1, ty);
        Expect(b, i, inst, 2, ty);
        break;
      case Opcode::kZExt:
      case Opcode::kTrunc: {
        int from = IntWidth(ty), to = IntWidth(inst.cast_to);
        bool ok = from > 0 && to > 0 && (inst.op == Opcode::kZExt ? to > from : to < from);
        if (!ok) {
          Report(b, i, fmt::format("invalid {} from {} to {}", OpcodeName(inst.op),
                                   TypeName(ty), TypeName(inst.cast_to)));
        }
        Arity(b, i, inst, 1);
        Expect(b, i, inst, 0, ty);
        break;
      }
      case Opcode::kSIToFP:
        if (!IsIntegerType(ty) || inst.cast_to != TypeTag::kF64) Report(b, i, "sitofp converts an integer to f64");
        Arity(b, i, inst, 1);
        Expect(b, i, inst, 0, ty);
        break;
      case Opcode::kFPToSI:
        if (ty != TypeTag::kF64 || !IsIntegerType(inst.cast_to)) Report(b, i, "fptosi converts f64 to an integer");
        Arity(b, i, inst, 1);
        Expect(b, i, inst, 0, ty);
        break;
      case Opcode::kLoad:
        if (ty == TypeTag::kVoid) Report(b, i, "load needs a value type");
        Arity(b, i, inst, 1);
        Expect(b, i, inst, 0, TypeTag::kPtr);
        break;
      case Opcode::kStore:
        if (ty == TypeTag::kVoid) Report(b, i, "store needs a value type");
        Arity(b, i, inst, 2);
        Expect(b, i, inst, 0, ty);
        Expect(b, i, inst, 1, TypeTag::kPtr);
        break;
      case Opcode::kGep:
        if (ty != TypeTag::kPtr) Report(b, i, "gep has type ptr");
        Arity(b, i, inst, 2);
        Expect(b, i, inst, 0, TypeTag::kPtr);
        if (inst.operands.size() == 2) {
          const Operand& idx = inst.operands[1];
          if (idx.is_reg()) {
            TypeTag it = OperandType(idx);
            if (it != TypeTag::kVoid && it != TypeTag::kI32 && it != TypeTag::kI64) {
              Report(b, i, "gep index must be i32 or i64");
            }
          } else if (idx.imm.kind != Literal::Kind::kInt) {
            Report(b, i, "gep index must be an integer");
          }
        }
        break;
      case Opcode::kConst:
        if (ty == TypeTag::kVoid) Report(b, i, "const needs a value type");
        Arity(b, i, inst, 1);
        Expect(b, i, inst, 0, ty);
        break;
      case Opcode::kAlloca:
        if (ty != TypeTag::kPtr) Report(b, i, "alloca has type ptr");
        Arity(b, i, inst, 1);
        if (!inst.operands.empty() &&
            (inst.operands[0].is_reg() || inst.operands[0].imm.kind != Literal::Kind::kInt ||
             inst.operands[0].imm.int_value <= 0)) {
          Report(b, i, "alloca takes a positive integer literal slot count");
        }
        break;
      case Opcode::kCall: {
        const Function* callee = m_.Find(inst.callee);
        if (!callee) {
          Report(b, i, fmt::format("call to undefined function @{}", inst.callee));
          break;
        }
        if (callee->return_type != ty) {
          Report(b, i, fmt::format("call to @{} declares return type {} but callee returns {}",
                                   inst.callee, TypeName(ty), TypeName(callee->return_type)));
        }
        if (inst.operands.size() != callee->params.size()) {
          Report(b, i, fmt::format("call to @{} passes {} argument(s), expected {}", inst.callee,
                                   inst.operands.size(), callee->params.size()));
          break;
        }
        for (std::size_t k = 0; k < inst.operands.size(); ++k) {
          Expect(b, i, inst, k, callee->ParamType(k));
        }
        break;
      }
      case Opcode::kBr:
        Arity(b, i, inst, 1);
        Expect(b, i, inst, 0, TypeTag::kI1);
        Targets(b, i, inst, 2);
        break;
      case Opcode::kJmp:
        Arity(b, i, inst, 0);
        Targets(b, i, inst, 1);
        break;
      case Opcode::kRet:
        if (ty != f_.return_type) {
          Report(b, i, fmt::format("ret type {} does not match function return type {}",
                                   TypeName(ty), TypeName(f_.return_type)));
        }
        Arity(b, i, inst, ty == TypeTag::kVoid ? 0 : 1);
        Expect(b, i, inst, 0, ty);
        break;
    }
    if (!IsTerminator(inst.op) && inst.op != Opcode::kBr) {
      for (int t : inst.targets) {
        (void)t;
        Report(b, i, "only br/jmp carry successors");
        break;
      }
    }
    TypeTag rt = inst.ResultType();
    if (inst.result >= 0) {
      if (!ValidReg(inst.result)) {
        Report(b, i, "result refers to an unknown register");
      } else if (rt == TypeTag::kVoid) {
        Report(b, i, fmt::format("'{}' does not produce a value", OpcodeName(inst.op)));
      } else if (f_.registers[inst.result].type != rt) {
        Report(b, i, fmt::format("register %{} has type {} but is assigned {}",
                                 f_.registers[inst.result].name,
                                 TypeName(f_.registers[inst.result].type), TypeName(rt)));
      }
    } else if (rt != TypeTag::kVoid && inst.op != Opcode::kCall) {
      Report(b, i, fmt::format("'{}' result is not assigned", OpcodeName(inst.op)));
    }
  }

  void CheckEntryHasNoPredecessors() {
    for (int b = 0; b < static_cast<int>(f_.blocks.size()); ++b) {
      for (int t : f_.blocks[b].instrs.back().targets) {
        if (t == 0) {
          Report(b, static_cast<int>(f_.blocks[b].instrs.size()) - 1,
                 fmt::format("entry block {} has a predecessor", f_.blocks[0].label));
          return;
        }
      }
    }
  }

  void CheckDefiniteAssignment() {
    // Reported once per register, at its first offending use.
    std::set<int> reported;
    auto unassigned = [&](int b, int i, int reg) {
      if (reported.insert(reg).second) {
        Report(b, i, fmt::format("register %{} used before assignment", f_.registers[reg].name));
      }
    };
    WalkDefiniteAssignment(f_, unassigned);
  }

 public:
  // Calls on_unassigned(block, instr, reg) for every read of a register that
  // is not assigned on all paths from entry. Unreachable blocks are skipped.
  template <typename Callback>
  static void WalkDefiniteAssignment(const Function& f, Callback on_unassigned) {
    const int nb = static_cast<int>(f.blocks.size());
    const int nr = static_cast<int>(f.registers.size());
    std::vector<std::vector<int>> preds(nb);
    for (int b = 0; b < nb; ++b) {
      if (f.blocks[b].instrs.empty()) continue;
      for (int t : f.blocks[b].instrs.back().targets) {
        if (t >= 0 && t < nb) preds[t].push_back(b);
      }
    }
    std::vector<bool> reachable(nb, false);
    std::vector<int> stack = {0};
    reachable[0] = true;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      if (f.blocks[b].instrs.empty()) continue;
      for (int t : f.blocks[b].instrs.back().targets) {
        if (t >= 0 && t < nb && !reachable[t]) {
          reachable[t] = true;
          stack.push_back(t);
        }
      }
    }
    std::vector<std::vector<bool>> out(nb, std::vector<bool>(nr, true));
    std::vector<bool> params(nr, false);
    for (int p : f.params) params[p] = true;
    auto transfer = [&](int b, std::vector<bool> state) {
      for (const auto& inst : f.blocks[b].instrs) {
        if (inst.result >= 0 && inst.result < nr) state[inst.result] = true;
      }
      return state;
    };
    auto in_state = [&](int b) {
      if (b == 0) return params;
      std::vector<bool> s(nr, true);
      for (int p : preds[b]) {
        if (!reachable[p]) continue;
        for (int r = 0; r < nr; ++r) s[r] = s[r] && out[p][r];
      }
      return s;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (int b = 0; b < nb; ++b) {
        if (!reachable[b]) continue;
        auto o = transfer(b, in_state(b));
        if (o != out[b]) {
          out[b] = std::move(o);
          changed = true;
        }
      }
    }
    for (int b = 0; b < nb; ++b) {
      if (!reachable[b]) continue;
      std::vector<bool> state = in_state(b);
      for (int i = 0; i < static_cast<int>(f.blocks[b].instrs.size()); ++i) {
        const Instruction& inst = f.blocks[b].instrs[i];
        for (const auto& o : inst.operands) {
          if (o.is_reg() && o.reg >= 0 && o.reg < nr && !state[o.reg]) {
            on_unassigned(b, i, o.reg);
          }
        }
        if (inst.result >= 0 && inst.result < nr) state[inst.result] = true;
      }
    }
  }

 private:
  const Function& f_;
  const Module& m_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> ValidateFunction(const Function& f, const Module& m) {
  return FunctionChecker(f, m).Run();
}

std::vector<int> MaybeUnassignedRegisters(const Function& f) {
  std::set<int> regs;
  if (f.blocks.empty()) return {};
  FunctionChecker::WalkDefiniteAssignment(f, [&](int, int, int r) { regs.insert(r); });
  return {regs.begin(), regs.end()};
}

std::vector<Diagnostic> ValidateModule(const Module& m) {
  std::vector<Diagnostic> diags;
  std::set<std::string> names;
  for (const auto& f : m.functions()) {
    if (!names.insert(f.name).second) {
      diags.push_back({0, 0, fmt::format("duplicate function @{}", f.name), f.name});
    }
    auto fd = ValidateFunction(f, m);
    diags.insert(diags.end(), fd.begin(), fd.end());
  }
  if (m.entry().empty() || !m.Contains(m.entry())) {
    diags.push_back({0, 0, fmt::format("entry function @{} does not exist", m.entry())});
  }
  // Recursion check: DFS over direct call edges.
  const auto& fns = m.functions();
  std::vector<int> color(fns.size(), 0);
  std::vector<std::set<std::size_t>> edges(fns.size());
  for (std::size_t i = 0; i < fns.size(); ++i) {
    for (const auto& b : fns[i].blocks) {
      for (const auto& inst : b.instrs) {
        if (inst.op != Opcode::kCall) continue;
        if (auto j = m.IndexOf(inst.callee)) edges[i].insert(*j);
      }
    }
  }
  bool cycle_reported = false;
  auto dfs = [&](auto&& self, std::size_t u) -> void {
    color[u] = 1;
    for (std::size_t v : edges[u]) {
      if (color[v] == 1 && !cycle_reported) {
        diags.push_back({0, 0, fmt::format("recursive call cycle through @{}", fns[v].name),
                         fns[u].name});
        cycle_reported = true;
      } else if (color[v] == 0) {
        self(self, v);
      }
    }
    color[u] = 2;
  };
  for (std::size_t i = 0; i < fns.size(); ++i) {
    if (color[i] == 0) dfs(dfs, i);
  }
  return diags;
}

void CheckModule(const Module& m) {
  auto diags = ValidateModule(m);
  if (!diags.empty()) throw IrError(std::move(diags));
}

}  // namespace mergedse::ir
