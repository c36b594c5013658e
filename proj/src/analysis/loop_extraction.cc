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

#include "mergedse/analysis/loop_extraction.h"

#include <algorithm>
#include <map>

#include "fmt/core.h"
#include "mergedse/analysis/loops.h"

namespace mergedse::analysis {
namespace {

using ir::BasicBlock;
using ir::Function;
using ir::Instruction;
using ir::Literal;
using ir::Opcode;
using ir::Operand;
using ir::TypeTag;

Instruction Make(Opcode op, TypeTag type, int result, std::vector<Operand> ops) {
  Instruction i;
  i.op = op;
  i.type = type;
  i.result = result;
  i.operands = std::move(ops);
  return i;
}

Instruction Jmp(int target) {
  Instruction i;
  i.op = Opcode::kJmp;
  i.targets = {target};
  return i;
}

Instruction Ret(TypeTag type, std::optional<Operand> v) {
  Instruction i;
  i.op = Opcode::kRet;
  i.type = type;
  if (v) i.operands.push_back(*v);
  return i;
}

std::string UniqueName(const ir::Module& m, const std::string& base) {
  if (!m.Contains(base)) return base;
  for (int k = 1;; ++k) {
    std::string c = fmt::format("{}.{}", base, k);
    if (!m.Contains(c)) return c;
  }
}

struct Plan {
  const Loop* loop;
  std::vector<int> params;     // live-in registers of f
  std::vector<int> live_outs;  // registers of f
  std::vector<int> exits;      // exit target blocks of f
  bool use_out = false;       // live-outs go through an out-ptr
  bool returns_exit = false;  // the callee returns the exit index
  TypeTag ret = TypeTag::kVoid;
  std::string name;
};

// Builds the outlined function for one loop.
Function Outline(const Function& f, const Plan& p) {
  Function g;
  g.name = p.name;
  g.provenance = ir::Provenance::kExtractedLoop;
  g.parents = {f.name};
  g.return_type = p.ret;

  std::map<int, int> reg;  // f register -> g register
  auto map_reg = [&](int r) {
    auto it = reg.find(r);
    if (it != reg.end()) return it->second;
    int nr = g.AddRegister(f.registers[r].name, f.registers[r].type);
    reg[r] = nr;
    return nr;
  };
  for (int r : p.params) g.params.push_back(map_reg(r));
  int out = -1;
  if (p.use_out) {
    out = g.AddRegister(g.FreshRegisterName("out"), TypeTag::kPtr);
    g.params.push_back(out);
  }

  std::vector<int> body(p.loop->blocks.begin(), p.loop->blocks.end());
  std::map<int, int> block;  // f block -> g block
  for (std::size_t k = 0; k < body.size(); ++k) block[body[k]] = static_cast<int>(k) + 1;
  const int first_stub = static_cast<int>(body.size()) + 1;
  for (std::size_t k = 0; k < p.exits.size(); ++k) {
    block[p.exits[k]] = first_stub + static_cast<int>(k);
  }

  g.blocks.push_back({"", {Jmp(block.at(p.loop->header))}});
  for (int b : body) {
    BasicBlock nb = f.blocks[b];
    for (auto& inst : nb.instrs) {
      if (inst.result >= 0) inst.result = map_reg(inst.result);
      for (auto& op : inst.operands) {
        if (op.is_reg()) op.reg = map_reg(op.reg);
      }
      for (int& t : inst.targets) t = block.at(t);
    }
    g.blocks.push_back(std::move(nb));
  }
  g.blocks[0].label = g.FreshLabel("loop.entry");

  int addr = -1;
  for (std::size_t k = 0; k < p.exits.size(); ++k) {
    BasicBlock stub;
    stub.label = g.FreshLabel(fmt::format("loop.exit{}", k));
    if (p.use_out) {
      for (std::size_t j = 0; j < p.live_outs.size(); ++j) {
        if (addr < 0) addr = g.AddRegister(g.FreshRegisterName("out.addr"), TypeTag::kPtr);
        int lo = map_reg(p.live_outs[j]);
        stub.instrs.push_back(Make(Opcode::kGep, TypeTag::kPtr, addr,
                                   {Operand::Reg(out), Operand::Imm(Literal::Int(j))}));
        stub.instrs.push_back(Make(Opcode::kStore, g.registers[lo].type, -1,
                                   {Operand::Reg(lo), Operand::Reg(addr)}));
      }
    }
    if (p.ret == TypeTag::kVoid) {
      stub.instrs.push_back(Ret(TypeTag::kVoid, std::nullopt));
    } else if (p.returns_exit) {
      stub.instrs.push_back(Ret(TypeTag::kI32, Operand::Imm(Literal::Int(k))));
    } else {
      stub.instrs.push_back(Ret(p.ret, Operand::Reg(map_reg(p.live_outs[0]))));
    }
    g.blocks.push_back(std::move(stub));
  }
  g.CanonicalizeRegisters();
  return g;
}

// The instructions replacing the loop header in f, plus any dispatch
// blocks. Block targets are f block indices; dispatch blocks are numbered
// from `next_virtual` upwards.
std::vector<BasicBlock> CallSequence(Function& f, const Plan& p, int& next_virtual,
                                     std::vector<int>& virtual_ids) {
  BasicBlock call_block;
  call_block.label = f.blocks[p.loop->header].label;
  auto& out = call_block.instrs;
  int slots = -1;
  if (p.use_out) {
    slots = f.AddRegister(f.FreshRegisterName("loop.slots"), TypeTag::kPtr);
    out.push_back(Make(Opcode::kAlloca, TypeTag::kPtr, slots,
                       {Operand::Imm(Literal::Int(static_cast<int64_t>(p.live_outs.size())))}));
  }
  Instruction call;
  call.op = Opcode::kCall;
  call.type = p.ret;
  call.callee = p.name;
  for (int r : p.params) call.operands.push_back(Operand::Reg(r));
  if (p.use_out) call.operands.push_back(Operand::Reg(slots));
  int exit_reg = -1;
  if (p.ret != TypeTag::kVoid) {
    if (p.returns_exit) {
      exit_reg = f.AddRegister(f.FreshRegisterName("loop.exit"), TypeTag::kI32);
      call.result = exit_reg;
    } else {
      call.result = p.live_outs[0];
    }
  }
  out.push_back(std::move(call));
  if (p.use_out) {
    int addr = f.AddRegister(f.FreshRegisterName("loop.addr"), TypeTag::kPtr);
    for (std::size_t j = 0; j < p.live_outs.size(); ++j) {
      int lo = p.live_outs[j];
      out.push_back(Make(Opcode::kGep, TypeTag::kPtr, addr,
                         {Operand::Reg(slots), Operand::Imm(Literal::Int(j))}));
      out.push_back(Make(Opcode::kLoad, f.registers[lo].type, lo, {Operand::Reg(addr)}));
    }
  }

  std::vector<BasicBlock> blocks;
  if (p.exits.size() == 1) {
    out.push_back(Jmp(p.exits[0]));
    blocks.push_back(std::move(call_block));
    return blocks;
  }
  // Compare-and-branch chain over the exit index; the last exit is the
  // fall-through of the final compare.
  int cond = f.AddRegister(f.FreshRegisterName("loop.hit"), TypeTag::kI1);
  BasicBlock* cur = &call_block;
  std::vector<BasicBlock> extra;
  std::string base = call_block.label;
  for (std::size_t k = 0; k + 1 < p.exits.size(); ++k) {
    Instruction cmp = Make(Opcode::kICmp, TypeTag::kI32, cond,
                           {Operand::Reg(exit_reg), Operand::Imm(Literal::Int(k))});
    cmp.pred = ir::Predicate::kEq;
    cur->instrs.push_back(std::move(cmp));
    Instruction br;
    br.op = Opcode::kBr;
    br.operands = {Operand::Reg(cond)};
    if (k + 2 == p.exits.size()) {
      br.targets = {p.exits[k], p.exits[k + 1]};
      cur->instrs.push_back(std::move(br));
    } else {
      int id = next_virtual++;
      virtual_ids.push_back(id);
      br.targets = {p.exits[k], id};
      cur->instrs.push_back(std::move(br));
      BasicBlock nb;
      nb.label = fmt::format("{}.dispatch{}", base, k + 1);
      extra.push_back(std::move(nb));
      cur = &extra.back();
    }
  }
  blocks.push_back(std::move(call_block));
  for (auto& b : extra) blocks.push_back(std::move(b));
  return blocks;
}

bool ExtractFunction(const Function& f, ExtractionResult& res) {
  LoopForest forest = NaturalLoops(f);
  std::vector<const Loop*> outer;
  for (const auto& l : forest.loops) {
    if (l.depth == 1) outer.push_back(&l);
  }
  if (forest.irreducible) {
    res.warnings.push_back(fmt::format("@{}: irreducible control flow, loops not extracted", f.name));
    return false;
  }
  if (outer.empty()) return false;
  auto live = LiveIn(f);
  auto succ = Successors(f);

  std::vector<Plan> plans;
  int k = 0;
  for (const Loop* l : outer) {
    // A ret block has no successors, so it is never inside a loop. Stack
    // memory would be released when the outlined function returns.
    bool bad = false;
    for (int b : l->blocks) {
      for (const auto& inst : f.blocks[b].instrs) bad |= inst.op == Opcode::kAlloca;
    }
    if (bad) {
      res.warnings.push_back(fmt::format("@{}: loop at '{}' contains alloca, not extracted",
                                         f.name, f.blocks[l->header].label));
      continue;
    }
    Plan p;
    p.loop = l;
    p.params.assign(live[l->header].begin(), live[l->header].end());
    std::set<int> defined, live_after;
    for (int b : l->blocks) {
      for (const auto& inst : f.blocks[b].instrs) {
        if (inst.result >= 0) defined.insert(inst.result);
      }
      for (int t : succ[b]) {
        if (l->blocks.count(t)) continue;
        if (std::find(p.exits.begin(), p.exits.end(), t) == p.exits.end()) p.exits.push_back(t);
        live_after.insert(live[t].begin(), live[t].end());
      }
    }
    for (int r : defined) {
      if (live_after.count(r)) p.live_outs.push_back(r);
    }
    if (p.exits.empty()) {
      res.warnings.push_back(fmt::format("@{}: loop at '{}' never exits, not extracted", f.name,
                                         f.blocks[l->header].label));
      continue;
    }
    if (p.exits.size() == 1 && p.live_outs.size() <= 1) {
      p.ret = p.live_outs.empty() ? TypeTag::kVoid : f.registers[p.live_outs[0]].type;
    } else {
      p.use_out = !p.live_outs.empty();
      p.returns_exit = p.exits.size() > 1;
      p.ret = p.returns_exit ? TypeTag::kI32 : TypeTag::kVoid;
    }
    p.name = UniqueName(res.module, fmt::format("{}_loop{}", f.name, k++));
    plans.push_back(p);
    // Reserve the name right away so later loops pick another.
    Function placeholder;
    placeholder.name = p.name;
    res.module.AddFunction(std::move(placeholder));
  }
  if (plans.empty()) return false;

  Function residual = f;
  std::vector<char> dropped(f.blocks.size(), 0);
  std::map<int, const Plan*> by_header;
  for (const auto& p : plans) {
    for (int b : p.loop->blocks) dropped[b] = b != p.loop->header;
    by_header[p.loop->header] = &p;
  }
  // Targets are old indices (or virtual ids for dispatch blocks) until the
  // final renumbering.
  int next_virtual = static_cast<int>(f.blocks.size());
  std::vector<BasicBlock> blocks;
  std::vector<int> ids;  // old or virtual id of each entry in `blocks`
  for (std::size_t b = 0; b < f.blocks.size(); ++b) {
    if (dropped[b]) continue;
    auto it = by_header.find(static_cast<int>(b));
    if (it == by_header.end()) {
      blocks.push_back(f.blocks[b]);
      ids.push_back(static_cast<int>(b));
      continue;
    }
    std::vector<int> virtual_ids;
    auto seq = CallSequence(residual, *it->second, next_virtual, virtual_ids);
    blocks.push_back(std::move(seq[0]));
    ids.push_back(static_cast<int>(b));
    for (std::size_t j = 1; j < seq.size(); ++j) {
      blocks.push_back(std::move(seq[j]));
      ids.push_back(virtual_ids[j - 1]);
    }
  }
  std::map<int, int> renumber;
  for (std::size_t j = 0; j < ids.size(); ++j) renumber[ids[j]] = static_cast<int>(j);
  for (auto& b : blocks) {
    for (auto& inst : b.instrs) {
      for (int& t : inst.targets) t = renumber.at(t);
    }
  }
  residual.blocks = std::move(blocks);
  residual.CanonicalizeRegisters();

  for (const auto& p : plans) {
    *res.module.FindMutable(p.name) = Outline(f, p);
    res.extracted.push_back(p.name);
  }
  *res.module.FindMutable(f.name) = std::move(residual);
  return true;
}

}  // namespace

ExtractionResult ExtractLoops(const ir::Module& m) {
  ExtractionResult res;
  res.module = m;
  for (const auto& f : m.functions()) {
    if (f.provenance != ir::Provenance::kOriginal) continue;
    ExtractFunction(f, res);
  }
  return res;
}

}  // namespace mergedse::analysis
