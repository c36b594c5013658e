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

#include "mergedse/merge/merger.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "fmt/core.h"
#include "mergedse/analysis/call_graph.h"
#include "mergedse/ir/text.h"
#include "mergedse/ir/validator.h"

namespace mergedse::merge {

using ir::Function;
using ir::Instruction;
using ir::Literal;
using ir::Opcode;
using ir::Operand;
using ir::TypeTag;

ParamMap MergeParameters(const Function& f1, const Function& f2) {
  ParamMap pm;
  std::vector<char> used(f2.params.size(), 0);
  std::size_t from = 0;
  for (std::size_t i = 0; i < f1.params.size(); ++i) {
    std::size_t j = from;
    while (j < f2.params.size() && f2.ParamType(j) != f1.ParamType(i)) ++j;
    if (j < f2.params.size()) {
      pm.matched.push_back({static_cast<int>(i), static_cast<int>(j)});
      used[j] = 1;
      from = j + 1;
    } else {
      pm.unmatched1.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t j = 0; j < f2.params.size(); ++j) {
    if (!used[j]) pm.unmatched2.push_back(static_cast<int>(j));
  }
  return pm;
}

ir::Literal NeutralLiteral(TypeTag t) {
  switch (t) {
    case TypeTag::kI1:
      return Literal::Bool(false);
    case TypeTag::kF64:
      return Literal::Float(0.0);
    default:
      return Literal::Int(0);
  }
}

std::string MergedName(const std::string& f1, const std::string& f2) {
  return fmt::format("{}__{}", f1, f2);
}

namespace {

Instruction MakeInst(Opcode op, TypeTag type, int result, std::vector<Operand> ops) {
  Instruction i;
  i.op = op;
  i.type = type;
  i.result = result;
  i.operands = std::move(ops);
  return i;
}

class Merger {
 public:
  Merger(const ir::Module& m, const Function& f1, const Function& f2,
         std::vector<InstrRef> s1, std::vector<InstrRef> s2, const ParamMap& pm)
      : m_(m), f_{&f1, &f2}, s_{std::move(s1), std::move(s2)}, pm_(pm) {
    const int n = static_cast<int>(f1.registers.size() + f2.registers.size());
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
    reg1_.assign(n, -1);
    reg2_.assign(n, -1);
    param_.assign(n, 0);
    for (int r = 0; r < static_cast<int>(f1.registers.size()); ++r) reg1_[r] = r;
    for (int r = 0; r < static_cast<int>(f2.registers.size()); ++r) reg2_[Node(1, r)] = r;
    for (int p : f1.params) param_[Node(0, p)] = 1;
    for (int p : f2.params) param_[Node(1, p)] = 1;
    for (auto [a, b] : pm.matched) {
      int x = Find(Node(0, f1.params[a])), y = Find(Node(1, f2.params[b]));
      parent_[y] = x;
      reg2_[x] = reg2_[y];
    }
  }

  // Un-aligns result-producing pairs whose registers cannot share one
  // merged register, then fixes the register classes.
  Alignment Unify(const Alignment& a) {
    Alignment out = a;
    out.entries.clear();
    for (const auto& e : a.entries) {
      if (e.kind == AlignEntry::Kind::kAligned) {
        const Instruction& i1 = Inst(0, e.i1);
        const Instruction& i2 = Inst(1, e.i2);
        if (i1.result >= 0 && !Union(Node(0, i1.result), Node(1, i2.result))) {
          out.entries.push_back(AlignEntry::Gap2(e.i1));
          out.entries.push_back(AlignEntry::Gap1(e.i2));
          continue;
        }
      }
      out.entries.push_back(e);
    }
    // Scores of the adjusted alignment are not recomputed; callers report
    // the fraction, which is.
    return out;
  }

  std::optional<Function> Build(const Alignment& a, const std::string& name, MergeOverhead& ov,
                                std::string& diag) {
    entries_ = a.entries;
    out_.name = name;
    out_.provenance = ir::Provenance::kMerged;
    out_.parents = {f_[0]->name, f_[1]->name};
    out_.return_type = f_[0]->return_type;
    MakeRegisters();
    Partition();

    // Fold the dispatching entry away when both parents start in the same
    // merged block; that block has no predecessors.
    const int b1 = leader_[0].at(0), b2 = leader_[1].at(0);
    const bool fresh_entry = b1 != b2;
    offset_ = fresh_entry ? 1 : 0;
    if (fresh_entry) out_.blocks.push_back({"merge.entry", {}});
    for (auto& mb : mblocks_) {
      ir::BasicBlock bb;
      bb.label = out_.FreshLabel(mb.label);
      out_.blocks.push_back(std::move(bb));
    }
    if (fresh_entry) {
      Instruction br;
      br.op = Opcode::kBr;
      br.operands = {Operand::Reg(fsel_)};
      br.targets = {b1 + offset_, b2 + offset_};
      out_.blocks[0].instrs.push_back(std::move(br));
      ++ov.glue;
    }
    for (std::size_t k = 0; k < mblocks_.size(); ++k) EmitBlock(static_cast<int>(k), ov);

    // Registers read on paths that cannot execute (the other parent's
    // side) still need a definition for the validator.
    auto maybe = ir::MaybeUnassignedRegisters(out_);
    std::vector<Instruction> init;
    for (int r : maybe) {
      TypeTag t = out_.registers[r].type;
      init.push_back(MakeInst(Opcode::kConst, t, r, {Operand::Imm(NeutralLiteral(t))}));
      ++ov.init_consts;
    }
    auto& entry = out_.blocks[0].instrs;
    entry.insert(entry.begin(), init.begin(), init.end());
    out_.CanonicalizeRegisters();

    auto diags = ir::ValidateFunction(out_, m_);
    if (!diags.empty()) {
      diag = fmt::format("merged body fails validation: {}", diags[0].ToString());
      return std::nullopt;
    }
    return std::move(out_);
  }

 private:
  struct MBlock {
    int first = 0, last = 0;  // entry range, inclusive
    bool side[2] = {false, false};
    std::string label;
  };

  int Node(int side, int reg) const {
    return side == 0 ? reg : static_cast<int>(f_[0]->registers.size()) + reg;
  }
  int Find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool Union(int a, int b) {
    a = Find(a), b = Find(b);
    if (a == b) return true;
    if ((reg1_[a] >= 0 && reg1_[b] >= 0) || (reg2_[a] >= 0 && reg2_[b] >= 0) ||
        (param_[a] && param_[b])) {
      return false;
    }
    parent_[b] = a;
    if (reg1_[a] < 0) reg1_[a] = reg1_[b];
    if (reg2_[a] < 0) reg2_[a] = reg2_[b];
    param_[a] |= param_[b];
    return true;
  }

  const Instruction& Inst(int side, int pos) const {
    const InstrRef& r = s_[side][pos];
    return f_[side]->blocks[r.block].instrs[r.index];
  }
  const InstrRef& Ref(int side, const AlignEntry& e) const {
    return s_[side][side == 0 ? e.i1 : e.i2];
  }
  static bool Has(const AlignEntry& e, int side) {
    return side == 0 ? e.kind != AlignEntry::Kind::kGap1 : e.kind != AlignEntry::Kind::kGap2;
  }

  void MakeRegisters() {
    // Classes holding an f1 register take its name first, so a self-merge
    // keeps every name.
    for (int side = 0; side < 2; ++side) {
      const Function& f = *f_[side];
      for (int r = 0; r < static_cast<int>(f.registers.size()); ++r) {
        int root = Find(Node(side, r));
        if (class_reg_.count(root)) continue;
        const std::string& base = f.registers[r].name;
        class_reg_[root] = out_.AddRegister(out_.FreshRegisterName(base), f.registers[r].type);
      }
    }
    for (auto [a, b] : pm_.matched) out_.params.push_back(Reg(0, f_[0]->params[a]));
    for (int a : pm_.unmatched1) out_.params.push_back(Reg(0, f_[0]->params[a]));
    for (int b : pm_.unmatched2) out_.params.push_back(Reg(1, f_[1]->params[b]));
    fsel_ = out_.AddRegister(out_.FreshRegisterName("f_sel"), TypeTag::kI1);
    out_.params.push_back(fsel_);
  }

  int Reg(int side, int r) { return class_reg_.at(Find(Node(side, r))); }

  Operand Map(int side, const Operand& o) {
    return o.is_reg() ? Operand::Reg(Reg(side, o.reg)) : o;
  }

  void Partition() {
    for (int side = 0; side < 2; ++side) {
      for (std::size_t b = 0; b < f_[side]->blocks.size(); ++b) leader_[side][b] = -1;
    }
    block_of_.assign(entries_.size(), -1);
    for (int k = 0; k < static_cast<int>(entries_.size()); ++k) {
      const AlignEntry& e = entries_[k];
      bool side[2] = {Has(e, 0), Has(e, 1)};
      bool leader = false;
      for (int s = 0; s < 2; ++s) leader |= side[s] && Ref(s, e).index == 0;
      bool start = mblocks_.empty() || leader || mblocks_.back().side[0] != side[0] ||
                   mblocks_.back().side[1] != side[1];
      if (!start) {
        const AlignEntry& prev = entries_[k - 1];
        for (int s = 0; s < 2; ++s) {
          if (Has(prev, s) && ir::IsTerminator(Inst(s, s == 0 ? prev.i1 : prev.i2).op)) start = true;
        }
      }
      if (start) {
        MBlock mb;
        mb.first = k;
        mb.side[0] = side[0];
        mb.side[1] = side[1];
        if (side[0] && Ref(0, e).index == 0) {
          mb.label = f_[0]->blocks[Ref(0, e).block].label;
        } else if (side[1] && Ref(1, e).index == 0) {
          mb.label = f_[1]->blocks[Ref(1, e).block].label;
        } else {
          mb.label = "m";
        }
        mblocks_.push_back(mb);
      }
      mblocks_.back().last = k;
      const int id = static_cast<int>(mblocks_.size()) - 1;
      block_of_[k] = id;
      for (int s = 0; s < 2; ++s) {
        if (side[s] && Ref(s, e).index == 0) leader_[s][Ref(s, e).block] = id;
      }
    }
    // Next entry holding each side, for fall-through continuations.
    for (int s = 0; s < 2; ++s) {
      next_[s].assign(entries_.size(), -1);
      int next = -1;
      for (int k = static_cast<int>(entries_.size()) - 1; k >= 0; --k) {
        next_[s][k] = next;
        if (Has(entries_[k], s)) next = k;
      }
    }
  }

  int Target(int side, int orig_block) const { return leader_[side].at(orig_block) + offset_; }

  int Continuation(int side, int last_entry) const {
    int e = next_[side][last_entry];
    return block_of_.at(e) + offset_;
  }

  Operand SelectOperand(std::vector<Instruction>& out, TypeTag t, Operand a, Operand b,
                        MergeOverhead& ov) {
    if (a == b) return a;
    int r = out_.AddRegister(out_.FreshRegisterName("sel"), t);
    out.push_back(MakeInst(Opcode::kSelect, t, r, {Operand::Reg(fsel_), a, b}));
    ++ov.selects;
    return Operand::Reg(r);
  }

  void EmitBlock(int id, MergeOverhead& ov) {
    const MBlock& mb = mblocks_[id];
    label_ = out_.blocks[id + offset_].label;
    std::vector<Instruction> code;
    bool terminated = false;
    for (int k = mb.first; k <= mb.last; ++k) {
      const AlignEntry& e = entries_[k];
      if (e.kind != AlignEntry::Kind::kAligned) {
        int s = e.kind == AlignEntry::Kind::kGap2 ? 0 : 1;
        Instruction inst = Inst(s, s == 0 ? e.i1 : e.i2);
        if (inst.result >= 0) inst.result = Reg(s, inst.result);
        for (auto& o : inst.operands) o = Map(s, o);
        for (int& t : inst.targets) t = Target(s, t);
        terminated = ir::IsTerminator(inst.op);
        code.push_back(std::move(inst));
        continue;
      }
      const Instruction& i1 = Inst(0, e.i1);
      const Instruction& i2 = Inst(1, e.i2);
      Instruction inst = i1;
      inst.targets.clear();
      if (inst.result >= 0) inst.result = Reg(0, i1.result);
      terminated = ir::IsTerminator(i1.op);
      if (i1.op == Opcode::kBr) {
        EmitBranch(code, i1, i2, ov);
        continue;
      }
      for (std::size_t o = 0; o < inst.operands.size(); ++o) {
        inst.operands[o] = SelectOperand(code, OperandType(*f_[0], i1, o, &m_),
                                         Map(0, i1.operands[o]), Map(1, i2.operands[o]), ov);
      }
      if (i1.op == Opcode::kJmp) {
        int t1 = Target(0, i1.targets[0]), t2 = Target(1, i2.targets[0]);
        if (t1 == t2) {
          inst.targets = {t1};
        } else {
          inst.op = Opcode::kBr;
          inst.operands = {Operand::Reg(fsel_)};
          inst.targets = {t1, t2};
        }
      }
      code.push_back(std::move(inst));
    }
    if (!terminated) {
      Instruction glue;
      int c[2] = {-1, -1};
      for (int s = 0; s < 2; ++s) {
        if (mb.side[s]) c[s] = Continuation(s, mb.last);
      }
      if (!mb.side[1] || !mb.side[0] || c[0] == c[1]) {
        glue.op = Opcode::kJmp;
        glue.targets = {mb.side[0] ? c[0] : c[1]};
      } else {
        glue.op = Opcode::kBr;
        glue.operands = {Operand::Reg(fsel_)};
        glue.targets = {c[0], c[1]};
      }
      code.push_back(std::move(glue));
      ++ov.glue;
    }
    out_.blocks[id + offset_].instrs = std::move(code);
  }

  void EmitBranch(std::vector<Instruction>& code, const Instruction& i1, const Instruction& i2,
                  MergeOverhead& ov) {
    Operand c1 = Map(0, i1.operands[0]), c2 = Map(1, i2.operands[0]);
    int t1 = Target(0, i1.targets[0]), e1 = Target(0, i1.targets[1]);
    int t2 = Target(1, i2.targets[0]), e2 = Target(1, i2.targets[1]);
    Instruction br;
    br.op = Opcode::kBr;
    if (t1 == t2 && e1 == e2) {
      br.operands = {SelectOperand(code, TypeTag::kI1, c1, c2, ov)};
      br.targets = {t1, e1};
    } else if (t1 == e2 && e1 == t2) {
      // Same two blocks, opposite sense: branch on c1 or on not c2.
      int neg = out_.AddRegister(out_.FreshRegisterName("not"), TypeTag::kI1);
      code.push_back(MakeInst(Opcode::kXor, TypeTag::kI1, neg, {c2, Operand::Imm(Literal::Bool(true))}));
      ++ov.selects;
      br.operands = {SelectOperand(code, TypeTag::kI1, c1, Operand::Reg(neg), ov)};
      br.targets = {t1, e1};
    } else {
      // Separate per-parent branches behind an f_sel dispatch.
      int d[2];
      Operand cond[2] = {c1, c2};
      int tt[2][2] = {{t1, e1}, {t2, e2}};
      for (int s = 0; s < 2; ++s) {
        ir::BasicBlock db;
        db.label = out_.FreshLabel(fmt::format("{}.sel{}", label_, s + 1));
        Instruction inner;
        inner.op = Opcode::kBr;
        inner.operands = {cond[s]};
        inner.targets = {tt[s][0], tt[s][1]};
        db.instrs.push_back(std::move(inner));
        ++ov.glue;
        d[s] = static_cast<int>(out_.blocks.size());
        out_.blocks.push_back(std::move(db));
      }
      br.operands = {Operand::Reg(fsel_)};
      br.targets = {d[0], d[1]};
    }
    code.push_back(std::move(br));
  }

  const ir::Module& m_;
  const Function* f_[2];
  std::vector<InstrRef> s_[2];
  ParamMap pm_;

  std::vector<int> parent_, reg1_, reg2_;
  std::vector<char> param_;
  std::map<int, int> class_reg_;

  std::vector<AlignEntry> entries_;
  std::vector<MBlock> mblocks_;
  std::vector<int> block_of_;
  std::map<int, int> leader_[2];
  std::vector<int> next_[2];
  int offset_ = 0;
  int fsel_ = -1;
  std::string label_;  // of the block being emitted
  Function out_;
};

}  // namespace

MergeResult MergeFunctions(const ir::Module& m, const Function& f1, const Function& f2,
                           uint64_t seed2, const Alignment& alignment, const ParamMap& params,
                           const std::string& name, const MergeOptions& opts) {
  MergeResult res;
  res.alignment = alignment;
  if (f1.return_type != f2.return_type) {
    res.diagnostic = fmt::format("return types differ ({} vs {})", ir::TypeName(f1.return_type),
                                 ir::TypeName(f2.return_type));
    return res;
  }
  if (alignment.AlignedFraction() < opts.min_aligned_fraction) {
    res.diagnostic = fmt::format("aligned fraction {:.4f} below {}", alignment.AlignedFraction(),
                                 opts.min_aligned_fraction);
    return res;
  }
  Merger merger(m, f1, f2, Linearize(f1, 0), Linearize(f2, seed2), params);
  Alignment adjusted = merger.Unify(alignment);
  MergeOverhead ov;
  std::string diag;
  auto fn = merger.Build(adjusted, name, ov, diag);
  if (!fn) {
    res.diagnostic = diag;
    return res;
  }
  MergedFunction mf;
  mf.function = std::move(*fn);
  mf.params = params;
  mf.alignment = adjusted;
  mf.overhead = ov;
  mf.non_glue = static_cast<int>(f1.InstructionCount() + f2.InstructionCount()) -
                adjusted.AlignedCount();
  res.alignment = adjusted;
  res.merged = std::move(mf);
  return res;
}

MergeResult MergePair(const ir::Module& m, const std::string& n1, const std::string& n2,
                      const std::string& name, const MergeOptions& opts) {
  MergeResult res;
  const Function* f1 = m.Find(n1);
  const Function* f2 = m.Find(n2);
  if (!f1 || !f2) {
    res.diagnostic = fmt::format("unknown function @{}", f1 ? n2 : n1);
    return res;
  }
  if (n1 == n2) {
    res.diagnostic = "cannot merge a function with itself";
    return res;
  }
  auto cg = analysis::BuildCallGraph(m);
  if (cg.TransitiveCallees(n1).count(n2) || cg.TransitiveCallees(n2).count(n1)) {
    res.diagnostic = fmt::format("@{} and @{} are related by calls", n1, n2);
    return res;
  }
  auto s1 = Linearize(*f1, 0);
  uint64_t best_seed = 0;
  Alignment best;
  bool have = false;
  for (int seed = 0; seed < std::max(1, opts.seeds); ++seed) {
    auto a = AlignFunctions(*f1, s1, *f2, Linearize(*f2, seed), opts.weights, &m);
    if (!have || a.score > best.score) {
      best = std::move(a);
      best_seed = seed;
      have = true;
    }
  }
  return MergeFunctions(m, *f1, *f2, best_seed, best, MergeParameters(*f1, *f2), name, opts);
}

CallAdapter CallAdapter::ForSide(const Function& p1, const Function& p2, const ParamMap& pm,
                                 int side) {
  CallAdapter a;
  auto add = [&](int param, TypeTag t) {
    a.sources_.push_back({param, t});
    a.fixed_.push_back(NeutralLiteral(t));
  };
  for (auto [i, j] : pm.matched) add(side == 1 ? i : j, p1.ParamType(i));
  for (int i : pm.unmatched1) add(side == 1 ? i : -1, p1.ParamType(i));
  for (int j : pm.unmatched2) add(side == 2 ? j : -1, p2.ParamType(j));
  a.sources_.push_back({-1, TypeTag::kI1});
  a.fixed_.push_back(Literal::Bool(side == 1));
  return a;
}

CallAdapter CallAdapter::Then(const CallAdapter& outer) const {
  CallAdapter c;
  for (std::size_t k = 0; k < outer.sources_.size(); ++k) {
    const Source& s = outer.sources_[k];
    if (s.parent_param < 0) {
      c.sources_.push_back(s);
      c.fixed_.push_back(outer.fixed_[k]);
    } else {
      c.sources_.push_back(sources_[s.parent_param]);
      c.fixed_.push_back(fixed_[s.parent_param]);
    }
  }
  return c;
}

std::vector<Operand> CallAdapter::Apply(const std::vector<Operand>& args) const {
  std::vector<Operand> out;
  for (std::size_t k = 0; k < sources_.size(); ++k) {
    out.push_back(sources_[k].parent_param >= 0 ? args.at(sources_[k].parent_param)
                                                : Operand::Imm(fixed_[k]));
  }
  return out;
}

ir::Invocation CallAdapter::Apply(const ir::Invocation& call) const {
  ir::Invocation out;
  out.regions = call.regions;
  for (std::size_t k = 0; k < sources_.size(); ++k) {
    out.args.push_back(sources_[k].parent_param >= 0 ? call.args.at(sources_[k].parent_param)
                                                     : ir::ArgSpec::Lit(fixed_[k]));
  }
  return out;
}

}  // namespace mergedse::merge
