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

#include "mergedse/ir/interpreter.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "fmt/core.h"

namespace mergedse::ir {
namespace {

uint64_t Normalize(TypeTag t, uint64_t v) {
  switch (t) {
    case TypeTag::kI1:
      return v & 1;
    case TypeTag::kI32:
      return static_cast<uint64_t>(static_cast<int64_t>(static_cast<int32_t>(v)));
    default:
      return v;
  }
}

uint64_t LiteralBits(const Literal& l, TypeTag t) {
  switch (l.kind) {
    case Literal::Kind::kFloat:
      return std::bit_cast<uint64_t>(l.float_value);
    case Literal::Kind::kBool:
      return static_cast<uint64_t>(l.int_value);
    case Literal::Kind::kInt:
      if (t == TypeTag::kF64) return std::bit_cast<uint64_t>(static_cast<double>(l.int_value));
      return Normalize(t, static_cast<uint64_t>(l.int_value));
  }
  return 0;
}

int Width(TypeTag t) {
  return t == TypeTag::kI1 ? 1 : t == TypeTag::kI32 ? 32 : 64;
}

int64_t SignedMin(TypeTag t) {
  return t == TypeTag::kI32 ? std::numeric_limits<int32_t>::min()
                            : std::numeric_limits<int64_t>::min();
}

class Machine {
 public:
  Machine(const Module& m, uint64_t fuel) : m_(m), fuel_(fuel) {
    const auto& fns = m.functions();
    callees_.resize(fns.size());
    for (std::size_t f = 0; f < fns.size(); ++f) {
      callees_[f].resize(fns[f].blocks.size());
      for (std::size_t b = 0; b < fns[f].blocks.size(); ++b) {
        for (const auto& inst : fns[f].blocks[b].instrs) {
          int idx = -1;
          if (inst.op == Opcode::kCall) {
            if (auto j = m.IndexOf(inst.callee)) idx = static_cast<int>(*j);
          }
          callees_[f][b].push_back(idx);
        }
      }
    }
    self_.assign(fns.size(), {});
    incl_.assign(fns.size(), {});
    invocations_.assign(fns.size(), 0);
  }

  ExecutionResult Run(const std::string& entry, const Invocation& inv) {
    auto fi = m_.IndexOf(entry);
    if (!fi) throw Trap(TrapKind::kBadInvocation, fmt::format("no function @{}", entry));
    const Function& f = m_.functions()[*fi];

    std::map<std::string, uint64_t> region_addr;
    arena_.assign(kArenaBase, 0);
    for (const auto& r : inv.regions) {
      region_addr[r.name] = arena_.size();
      arena_.insert(arena_.end(), r.bytes.begin(), r.bytes.end());
      arena_.resize((arena_.size() + kSlotBytes - 1) / kSlotBytes * kSlotBytes, 0);
    }
    const std::size_t image_end = arena_.size();

    if (inv.args.size() != f.params.size()) {
      throw Trap(TrapKind::kBadInvocation,
                 fmt::format("@{} takes {} argument(s), invocation supplies {}", f.name,
                             f.params.size(), inv.args.size()));
    }
    std::vector<uint64_t> args;
    for (std::size_t k = 0; k < inv.args.size(); ++k) {
      const ArgSpec& a = inv.args[k];
      TypeTag t = f.ParamType(k);
      if (a.kind == ArgSpec::Kind::kRegion) {
        auto it = region_addr.find(a.region);
        if (t != TypeTag::kPtr || it == region_addr.end()) {
          throw Trap(TrapKind::kBadInvocation,
                     fmt::format("argument {} of @{} cannot take region '{}'", k, f.name, a.region));
        }
        args.push_back(it->second);
      } else {
        bool ok = a.literal.kind == Literal::Kind::kFloat ? t == TypeTag::kF64
                  : a.literal.kind == Literal::Kind::kBool ? t == TypeTag::kI1
                                                            : true;
        if (!ok) {
          throw Trap(TrapKind::kBadInvocation,
                     fmt::format("argument {} of @{} has the wrong literal kind", k, f.name));
        }
        args.push_back(LiteralBits(a.literal, t));
      }
    }

    ExecutionResult result;
    result.type = f.return_type;
    invocations_[*fi]++;
    uint64_t v = Call(*fi, args);
    if (f.return_type != TypeTag::kVoid) result.value = v;
    result.heap.assign(arena_.begin() + kArenaBase, arena_.begin() + image_end);

    const auto& fns = m_.functions();
    for (std::size_t i = 0; i < fns.size(); ++i) {
      if (invocations_[i] == 0) continue;
      result.trace.self_counts[fns[i].name] = self_[i];
      result.trace.inclusive_counts[fns[i].name] = incl_[i];
      result.trace.invocations[fns[i].name] = invocations_[i];
    }
    for (const auto& [edge, n] : calls_) {
      CallEdge e{fns[edge.first].name, fns[edge.second].name};
      result.trace.calls[e] = n;
      result.trace.call_bytes[e] = bytes_[edge];
    }
    result.trace.total_instructions = executed_;
    return result;
  }

 private:
  uint64_t Get(const std::vector<uint64_t>& regs, const Operand& o, TypeTag t) const {
    return o.is_reg() ? regs[o.reg] : LiteralBits(o.imm, t);
  }

  void CheckAccess(uint64_t addr) const {
    if (addr < kArenaBase || addr > arena_.size() || arena_.size() - addr < kSlotBytes) {
      throw Trap(TrapKind::kOutOfBounds, fmt::format("out-of-bounds access at address {}", addr));
    }
  }

  uint64_t Load(uint64_t addr) {
    CheckAccess(addr);
    uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | arena_[addr + k];
    mem_bytes_ += kSlotBytes;
    return v;
  }

  void Store(uint64_t addr, uint64_t v) {
    CheckAccess(addr);
    for (int k = 0; k < 8; ++k) arena_[addr + k] = static_cast<uint8_t>(v >> (8 * k));
    mem_bytes_ += kSlotBytes;
  }

  uint64_t IntBinary(Opcode op, TypeTag t, uint64_t a, uint64_t b) {
    const int64_t sa = static_cast<int64_t>(a), sb = static_cast<int64_t>(b);
    uint64_t r = 0;
    switch (op) {
      case Opcode::kAdd:
        r = a + b;
        break;
      case Opcode::kSub:
        r = a - b;
        break;
      case Opcode::kMul:
        r = a * b;
        break;
      case Opcode::kSDiv:
      case Opcode::kSRem:
        if (b == 0) throw Trap(TrapKind::kDivisionByZero, "integer division by zero");
        if (t == TypeTag::kI1) {
          r = op == Opcode::kSDiv ? a : 0;
        } else if (sa == SignedMin(t) && sb == -1) {
          r = op == Opcode::kSDiv ? a : 0;  // wraps
        } else {
          r = static_cast<uint64_t>(op == Opcode::kSDiv ? sa / sb : sa % sb);
        }
        break;
      case Opcode::kAnd:
        r = a & b;
        break;
      case Opcode::kOr:
        r = a | b;
        break;
      case Opcode::kXor:
        r = a ^ b;
        break;
      case Opcode::kShl:
        r = a << (b & static_cast<uint64_t>(Width(t) - 1));
        break;
      case Opcode::kAShr:
        r = static_cast<uint64_t>(sa >> (b & static_cast<uint64_t>(Width(t) - 1)));
        break;
      default:
        break;
    }
    return Normalize(t, r);
  }

  uint64_t FloatBinary(Opcode op, uint64_t a, uint64_t b) {
    double x = AsDouble(a), y = AsDouble(b), r = 0;
    switch (op) {
      case Opcode::kFAdd:
        r = x + y;
        break;
      case Opcode::kFSub:
        r = x - y;
        break;
      case Opcode::kFMul:
        r = x * y;
        break;
      case Opcode::kFDiv:
        if (y == 0.0) throw Trap(TrapKind::kDivisionByZero, "floating-point division by zero");
        r = x / y;
        break;
      default:
        break;
    }
    return std::bit_cast<uint64_t>(r);
  }

  static bool Compare(Predicate p, uint64_t a, uint64_t b) {
    const int64_t sa = static_cast<int64_t>(a), sb = static_cast<int64_t>(b);
    switch (p) {
      case Predicate::kEq:
        return a == b;
      case Predicate::kNe:
        return a != b;
      case Predicate::kSlt:
        return sa < sb;
      case Predicate::kSgt:
        return sa > sb;
      case Predicate::kSle:
        return sa <= sb;
      case Predicate::kSge:
        return sa >= sb;
      case Predicate::kOlt:
        return AsDouble(a) < AsDouble(b);
      case Predicate::kOgt:
        return AsDouble(a) > AsDouble(b);
      case Predicate::kOeq:
        return AsDouble(a) == AsDouble(b);
      default:
        return false;
    }
  }

  static uint64_t FloatToInt(double d, TypeTag t) {
    if (std::isnan(d)) return 0;
    if (t == TypeTag::kI1) return d >= 1.0 ? 1 : 0;
    const double lo = static_cast<double>(SignedMin(t));
    const double hi = -lo;  // exclusive upper bound, 2^31 or 2^63
    if (d <= lo) return Normalize(t, static_cast<uint64_t>(SignedMin(t)));
    if (d >= hi) {
      return Normalize(t, t == TypeTag::kI32
                              ? static_cast<uint64_t>(std::numeric_limits<int32_t>::max())
                              : static_cast<uint64_t>(std::numeric_limits<int64_t>::max()));
    }
    return Normalize(t, static_cast<uint64_t>(static_cast<int64_t>(d)));
  }

  uint64_t Call(std::size_t fi, const std::vector<uint64_t>& args) {
    const Function& f = m_.functions()[fi];
    const PerOpcode<uint64_t> global_snapshot = global_;
    const std::size_t arena_mark = arena_.size();
    auto& self = self_[fi];

    std::vector<uint64_t> regs(f.registers.size(), 0);
    for (std::size_t k = 0; k < f.params.size(); ++k) regs[f.params[k]] = args[k];

    uint64_t ret = 0;
    int b = 0;
    bool done = false;
    while (!done) {
      const auto& instrs = f.blocks[b].instrs;
      int next = -1;
      for (std::size_t i = 0; i < instrs.size(); ++i) {
        const Instruction& inst = instrs[i];
        if (fuel_ == 0) {
          throw Trap(TrapKind::kFuelExhausted, "fuel exhausted");
        }
        --fuel_;
        ++executed_;
        const std::size_t oi = OpIndex(inst.op);
        ++self[oi];
        ++global_[oi];
        const auto& ops = inst.operands;
        uint64_t out = 0;
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
            out = IntBinary(inst.op, inst.type, Get(regs, ops[0], inst.type),
                            Get(regs, ops[1], inst.type));
            break;
          case Opcode::kFAdd:
          case Opcode::kFSub:
          case Opcode::kFMul:
          case Opcode::kFDiv:
            out = FloatBinary(inst.op, Get(regs, ops[0], inst.type), Get(regs, ops[1], inst.type));
            break;
          case Opcode::kICmp:
          case Opcode::kFCmp:
            out = Compare(inst.pred, Get(regs, ops[0], inst.type), Get(regs, ops[1], inst.type));
            break;
          case Opcode::kSelect:
            out = Get(regs, ops[0], TypeTag::kI1) ? Get(regs, ops[1], inst.type)
                                                  : Get(regs, ops[2], inst.type);
            break;
          case Opcode::kZExt: {
            uint64_t v = Get(regs, ops[0], inst.type);
            out = inst.type == TypeTag::kI1 ? (v & 1) : (v & 0xffffffffULL);
            break;
          }
          case Opcode::kTrunc:
            out = Normalize(inst.cast_to, Get(regs, ops[0], inst.type));
            break;
          case Opcode::kSIToFP:
            out = std::bit_cast<uint64_t>(
                static_cast<double>(static_cast<int64_t>(Get(regs, ops[0], inst.type))));
            break;
          case Opcode::kFPToSI:
            out = FloatToInt(AsDouble(Get(regs, ops[0], inst.type)), inst.cast_to);
            break;
          case Opcode::kLoad:
            out = Normalize(inst.type, Load(Get(regs, ops[0], TypeTag::kPtr)));
            break;
          case Opcode::kStore:
            Store(Get(regs, ops[1], TypeTag::kPtr), Get(regs, ops[0], inst.type));
            break;
          case Opcode::kGep: {
            uint64_t idx = Get(regs, ops[1], TypeTag::kI64);
            out = Get(regs, ops[0], TypeTag::kPtr) + idx * kSlotBytes;
            break;
          }
          case Opcode::kConst:
            out = Get(regs, ops[0], inst.type);
            break;
          case Opcode::kAlloca: {
            out = arena_.size();
            arena_.resize(arena_.size() + static_cast<uint64_t>(ops[0].imm.int_value) * kSlotBytes, 0);
            break;
          }
          case Opcode::kCall: {
            const int ci = callees_[fi][b][i];
            const Function& callee = m_.functions()[ci];
            std::vector<uint64_t> call_args(ops.size());
            uint64_t scalar_bytes = callee.return_type == TypeTag::kVoid ? 0 : kSlotBytes;
            for (std::size_t k = 0; k < ops.size(); ++k) {
              TypeTag pt = callee.ParamType(k);
              call_args[k] = Get(regs, ops[k], pt);
              if (pt != TypeTag::kPtr) scalar_bytes += kSlotBytes;
            }
            const uint64_t mem_before = mem_bytes_;
            invocations_[ci]++;
            out = Call(ci, call_args);
            auto edge = std::make_pair(static_cast<int>(fi), ci);
            calls_[edge]++;
            bytes_[edge] += scalar_bytes + (mem_bytes_ - mem_before);
            break;
          }
          case Opcode::kBr:
            next = Get(regs, ops[0], TypeTag::kI1) ? inst.targets[0] : inst.targets[1];
            break;
          case Opcode::kJmp:
            next = inst.targets[0];
            break;
          case Opcode::kRet:
            if (!ops.empty()) ret = Get(regs, ops[0], inst.type);
            done = true;
            break;
        }
        if (inst.result >= 0) regs[inst.result] = out;
      }
      if (!done && next < 0) {
        throw Trap(TrapKind::kBadInvocation,
                   fmt::format("block {} of @{} has no terminator", f.blocks[b].label, f.name));
      }
      b = next;
    }

    auto& incl = incl_[fi];
    for (std::size_t k = 0; k < kNumOpcodes; ++k) incl[k] += global_[k] - global_snapshot[k];
    arena_.resize(arena_mark);
    return ret;
  }

  const Module& m_;
  uint64_t fuel_;
  uint64_t executed_ = 0;
  std::vector<std::vector<std::vector<int>>> callees_;
  std::vector<uint8_t> arena_;
  PerOpcode<uint64_t> global_{};
  uint64_t mem_bytes_ = 0;
  std::vector<PerOpcode<uint64_t>> self_, incl_;
  std::vector<uint64_t> invocations_;
  std::map<std::pair<int, int>, uint64_t> calls_, bytes_;
};

}  // namespace

void Trace::Accumulate(const Trace& o) {
  auto add = [](auto& dst, const auto& src) {
    for (const auto& [k, v] : src) {
      auto& slot = dst[k];
      for (std::size_t i = 0; i < kNumOpcodes; ++i) slot[i] += v[i];
    }
  };
  add(self_counts, o.self_counts);
  add(inclusive_counts, o.inclusive_counts);
  for (const auto& [k, v] : o.invocations) invocations[k] += v;
  for (const auto& [k, v] : o.calls) calls[k] += v;
  for (const auto& [k, v] : o.call_bytes) call_bytes[k] += v;
  total_instructions += o.total_instructions;
}

uint64_t Trace::Calls(const std::string& caller, const std::string& callee) const {
  auto it = calls.find({caller, callee});
  return it == calls.end() ? 0 : it->second;
}

uint64_t Trace::Bytes(const std::string& caller, const std::string& callee) const {
  auto it = call_bytes.find({caller, callee});
  return it == call_bytes.end() ? 0 : it->second;
}

std::string_view TrapName(TrapKind k) {
  switch (k) {
    case TrapKind::kFuelExhausted:
      return "fuel-exhausted";
    case TrapKind::kDivisionByZero:
      return "division-by-zero";
    case TrapKind::kOutOfBounds:
      return "out-of-bounds";
    case TrapKind::kBadInvocation:
      return "bad-invocation";
  }
  return "";
}

ExecutionResult Interpret(const Module& m, const std::string& entry, const Invocation& inv,
                          uint64_t fuel) {
  Machine machine(m, fuel);
  return machine.Run(entry, inv);
}

double AsDouble(uint64_t bits) { return std::bit_cast<double>(bits); }
int64_t AsInt(uint64_t bits) { return static_cast<int64_t>(bits); }

std::string FormatValue(uint64_t bits, TypeTag type) {
  switch (type) {
    case TypeTag::kF64:
      return fmt::format("{}", AsDouble(bits));
    case TypeTag::kI1:
      return bits ? "true" : "false";
    case TypeTag::kVoid:
      return "void";
    default:
      return std::to_string(AsInt(bits));
  }
}

Outcome RunForOutcome(const Module& m, const std::string& entry, const Invocation& inv,
                      uint64_t fuel) {
  Outcome o;
  try {
    ExecutionResult r = Interpret(m, entry, inv, fuel);
    o.value = r.value;
    o.heap = std::move(r.heap);
  } catch (const Trap& t) {
    o.trap = t.kind();
  }
  return o;
}

std::string Outcome::ToString(TypeTag type) const {
  if (trap) return fmt::format("trap {}", TrapName(*trap));
  std::string s = value ? FormatValue(*value, type) : "void";
  return fmt::format("{} (heap {} bytes)", s, heap.size());
}

}  // namespace mergedse::ir
