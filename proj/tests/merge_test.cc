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

#include <map>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "mergedse/analysis/fingerprint.h"
#include "mergedse/analysis/loop_extraction.h"
#include "mergedse/ir/interpreter.h"
#include "mergedse/ir/text.h"
#include "mergedse/ir/validator.h"
#include "mergedse/merge/align.h"
#include "mergedse/merge/merger.h"
#include "mergedse/merge/verify.h"
#include "oracles.h"
#include "test_util.h"

namespace mergedse::merge {
namespace {

using ir::Opcode;
using ir::ParseModule;
using testing::LoadCorpusModule;

std::vector<std::string> Labels(const ir::Function& f, const std::vector<int>& order) {
  std::vector<std::string> out;
  for (int b : order) out.push_back(f.blocks[b].label);
  return out;
}

constexpr char kDiamond[] = R"(
func @d(%c: i1, %x: i64) -> i64 {
A:
  br %c, B, C
B:
  %y = add i64 %x, 1
  jmp D
C:
  %y = sub i64 %x, 1
  jmp D
D:
  ret i64 %y
}
)";

TEST(LinearizeTest, SingleBlockAnySeed) {
  auto m = ParseModule("func @f(%a: i64) -> i64 { bb0: %b = add i64 %a, 1 %b = mul i64 %b, 3 ret i64 %b }");
  const auto& f = m.functions()[0];
  for (uint64_t seed : {0, 1, 7, 12345}) {
    auto s = Linearize(f, seed);
    ASSERT_EQ(s.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s[i], (InstrRef{0, i}));
  }
}

TEST(LinearizeTest, DiamondSeeds) {
  auto m = ParseModule(kDiamond);
  const auto& f = m.functions()[0];
  EXPECT_EQ(Labels(f, BlockOrder(f, 0)), (std::vector<std::string>{"A", "B", "C", "D"}));
  EXPECT_EQ(Labels(f, BlockOrder(f, 1)), (std::vector<std::string>{"A", "C", "B", "D"}));
}

TEST(LinearizeTest, Fig5F2) {
  auto m = LoadCorpusModule("fig5.ir");
  const auto& f2 = *m.Find("f2");
  auto order = Labels(f2, BlockOrder(f2, 0));
  ASSERT_EQ(order.size(), 4u);
  EXPECT_EQ(order.front(), "entry");
  EXPECT_EQ(order.back(), "join");
  auto s = Linearize(f2, 0);
  EXPECT_EQ(s.size(), f2.InstructionCount());
  EXPECT_EQ(f2.blocks[s.back().block].instrs[s.back().index].op, Opcode::kRet);
}

TEST(LinearizeTest, BlocksStayContiguousAndComplete) {
  for (const auto& prog : testing::CorpusPrograms()) {
    auto m = LoadCorpusModule(prog + ".ir");
    for (const auto& f : m.functions()) {
      for (uint64_t seed = 0; seed < 4; ++seed) {
        auto s = Linearize(f, seed);
        ASSERT_EQ(s.size(), f.InstructionCount());
        std::set<std::pair<int, int>> seen;
        for (std::size_t k = 0; k < s.size(); ++k) {
          seen.insert({s[k].block, s[k].index});
          if (s[k].index > 0) {
            ASSERT_GT(k, 0u);
            EXPECT_EQ(s[k - 1], (InstrRef{s[k].block, s[k].index - 1}));
          }
        }
        EXPECT_EQ(seen.size(), s.size());
        EXPECT_EQ(s.front(), (InstrRef{0, 0}));
        EXPECT_EQ(Linearize(f, seed), s);
      }
    }
  }
}

// Alignment over plain opcode sequences.
Alignment AlignOps(const std::vector<Opcode>& a, const std::vector<Opcode>& b,
                   const ir::PerOpcode<double>& w, double gap) {
  return AlignSequences(
      a.size(), b.size(),
      [&](int i, int j) -> std::optional<double> {
        if (a[i] != b[j]) return std::nullopt;
        return w[ir::OpIndex(a[i])];
      },
      gap);
}

void ExpectWellFormed(const Alignment& al, const std::vector<Opcode>& a,
                      const std::vector<Opcode>& b) {
  int next1 = 0, next2 = 0;
  for (const auto& e : al.entries) {
    if (e.kind != AlignEntry::Kind::kGap1) EXPECT_EQ(e.i1, next1++);
    if (e.kind != AlignEntry::Kind::kGap2) EXPECT_EQ(e.i2, next2++);
    if (e.kind == AlignEntry::Kind::kAligned) EXPECT_EQ(a[e.i1], b[e.i2]);
  }
  EXPECT_EQ(next1, static_cast<int>(a.size()));
  EXPECT_EQ(next2, static_cast<int>(b.size()));
}

ir::PerOpcode<double> Unit() {
  ir::PerOpcode<double> w;
  w.fill(1.0);
  return w;
}

TEST(AlignTest, IdenticalSequences) {
  std::vector<Opcode> s{Opcode::kLoad, Opcode::kAdd, Opcode::kStore, Opcode::kRet};
  auto al = AlignOps(s, s, AlignWeights::Default().match, 0.1);
  EXPECT_EQ(al.AlignedCount(), 4);
  EXPECT_EQ(al.GapCount(), 0);
  EXPECT_EQ(al.AlignedFraction(), 1.0);
}

TEST(AlignTest, NothingInCommon) {
  auto al = AlignOps({Opcode::kAdd}, {Opcode::kMul}, Unit(), 0.1);
  EXPECT_EQ(al.AlignedCount(), 0);
  EXPECT_EQ(al.GapCount(), 2);
}

TEST(AlignTest, LoadAddMulStore) {
  std::vector<Opcode> a{Opcode::kLoad, Opcode::kAdd, Opcode::kMul, Opcode::kStore};
  std::vector<Opcode> b{Opcode::kLoad, Opcode::kMul, Opcode::kStore};
  auto al = AlignOps(a, b, Unit(), 0.0);
  EXPECT_EQ(al.AlignedCount(), 3);
  EXPECT_EQ(al.GapCount(), 1);
  EXPECT_EQ(al.score, 3.0);
  ExpectWellFormed(al, a, b);
  auto fn = [&](int i, int j) -> std::optional<double> {
    if (a[i] != b[j]) return std::nullopt;
    return 1.0;
  };
  EXPECT_EQ(testing::BruteForceAlignScore(4, 3, fn, 0.0), 3.0);
}

TEST(AlignTest, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(99);
  const std::vector<Opcode> alphabet{Opcode::kAdd, Opcode::kMul, Opcode::kLoad, Opcode::kStore,
                                     Opcode::kBr};
  // Dyadic weights and gaps keep every score exact in binary.
  const double gaps[] = {0.0, 0.25, 0.5, 1.0, 3.0};
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<Opcode> a(1 + rng() % 8), b(1 + rng() % 8);
    for (auto& o : a) o = alphabet[rng() % alphabet.size()];
    for (auto& o : b) o = alphabet[rng() % alphabet.size()];
    ir::PerOpcode<double> w{};
    for (Opcode o : alphabet) w[ir::OpIndex(o)] = static_cast<double>(1 + rng() % 4);
    double gap = gaps[rng() % 5];
    auto al = AlignOps(a, b, w, gap);
    ExpectWellFormed(al, a, b);
    auto fn = [&](int i, int j) -> std::optional<double> {
      if (a[i] != b[j]) return std::nullopt;
      return w[ir::OpIndex(a[i])];
    };
    ASSERT_EQ(al.score, testing::BruteForceAlignScore(a.size(), b.size(), fn, gap)) << trial;
  }
}

TEST(AlignTest, DefaultWeights) {
  auto w = AlignWeights::Default();
  EXPECT_EQ(w.match[ir::OpIndex(Opcode::kCall)], 4.0);
  EXPECT_EQ(w.match[ir::OpIndex(Opcode::kFDiv)], 4.0);
  EXPECT_EQ(w.match[ir::OpIndex(Opcode::kAdd)], 1.0);
  EXPECT_EQ(w.gap, 0.1);
}

TEST(AlignTest, CallsAlignOnlyWithSameCallee) {
  auto m = ParseModule(R"(
func @g(%x: i64) -> i64 { bb0: ret i64 %x }
func @h(%x: i64) -> i64 { bb0: ret i64 %x }
func @p(%x: i64) -> i64 { bb0: %y = call i64 @g(%x) ret i64 %y }
func @q(%x: i64) -> i64 { bb0: %y = call i64 @h(%x) ret i64 %y }
func @r(%x: i64) -> i64 { bb0: %y = call i64 @g(%x) ret i64 %y }
)");
  const auto& p = *m.Find("p");
  const auto& q = *m.Find("q");
  const auto& r = *m.Find("r");
  EXPECT_FALSE(Compatible(p, p.blocks[0].instrs[0], q, q.blocks[0].instrs[0], &m));
  EXPECT_TRUE(Compatible(p, p.blocks[0].instrs[0], r, r.blocks[0].instrs[0], &m));
}

TEST(MergeParametersTest, Fig5) {
  auto m = LoadCorpusModule("fig5.ir");
  auto pm = MergeParameters(*m.Find("f1"), *m.Find("f2"));
  EXPECT_EQ(pm.matched, (std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 3}}));
  EXPECT_TRUE(pm.unmatched1.empty());
  EXPECT_EQ(pm.unmatched2, std::vector<int>{2});
}

TEST(MergeParametersTest, IdenticalAndDisjointSignatures) {
  auto m = ParseModule(R"(
func @a(%x: i32, %y: ptr) -> void { bb0: ret }
func @b(%p: i32, %q: ptr) -> void { bb0: ret }
func @c(%x: f64) -> void { bb0: ret }
func @d(%x: i32) -> void { bb0: ret }
)");
  auto same = MergeParameters(*m.Find("a"), *m.Find("b"));
  EXPECT_EQ(same.matched.size(), 2u);
  EXPECT_TRUE(same.unmatched1.empty() && same.unmatched2.empty());
  auto none = MergeParameters(*m.Find("c"), *m.Find("d"));
  EXPECT_TRUE(none.matched.empty());
  EXPECT_EQ(none.unmatched1, std::vector<int>{0});
  EXPECT_EQ(none.unmatched2, std::vector<int>{0});
}

TEST(MergeParametersTest, KeepsDeclarationOrder) {
  auto m = ParseModule(R"(
func @a(%x: i1, %y: i32) -> void { bb0: ret }
func @b(%p: i32, %q: i1) -> void { bb0: ret }
)");
  auto pm = MergeParameters(*m.Find("a"), *m.Find("b"));
  // x matches q; y would need p, which precedes q.
  EXPECT_EQ(pm.matched, (std::vector<std::pair<int, int>>{{0, 1}}));
  EXPECT_EQ(pm.unmatched1, std::vector<int>{1});
  EXPECT_EQ(pm.unmatched2, std::vector<int>{0});
}

// Adds the merged function to a copy of m and verifies it.
VerifyReport AddAndVerify(ir::Module m, const MergedFunction& mf, int trials = 200) {
  m.AddFunction(mf.function);
  VerifyOptions vo;
  vo.trials = trials;
  return VerifyMerge(m, mf.function.parents[0], mf.function.parents[1], mf.function.name, vo);
}

int CountOps(const ir::Function& f, Opcode op) {
  int n = 0;
  for (const auto& b : f.blocks) {
    for (const auto& i : b.instrs) n += i.op == op;
  }
  return n;
}

TEST(MergeTest, SelfMergeIsOriginalPlusSelector) {
  for (const char* name : {"matvec", "rowsum", "trace"}) {
    auto m = LoadCorpusModule("matrix.ir");
    ir::Function copy = *m.Find(name);
    copy.name = std::string(name) + "_copy";
    for (auto& r : copy.registers) r.name += "_c";
    for (auto& b : copy.blocks) b.label += "_c";
    m.AddFunction(copy);
    auto res = MergePair(m, name, copy.name, "self");
    ASSERT_TRUE(res.merged) << res.diagnostic;
    const auto& mf = *res.merged;
    EXPECT_EQ(mf.alignment.AlignedFraction(), 1.0);
    EXPECT_EQ(mf.overhead.selects, 0);
    ir::Function expected = *m.Find(name);
    expected.name = "self";
    expected.provenance = ir::Provenance::kMerged;
    expected.parents = {name, copy.name};
    expected.params.push_back(expected.AddRegister("f_sel", ir::TypeTag::kI1));
    expected.CanonicalizeRegisters();
    EXPECT_EQ(mf.function, expected) << ir::PrintFunction(mf.function);
    EXPECT_TRUE(AddAndVerify(m, mf, 50).passed);
  }
}

TEST(MergeTest, Fig5Structure) {
  auto m = LoadCorpusModule("fig5.ir");
  auto res = MergePair(m, "f1", "f2", "f12");
  ASSERT_TRUE(res.merged) << res.diagnostic;
  const ir::Function& f = res.merged->function;
  EXPECT_EQ(f.provenance, ir::Provenance::kMerged);
  EXPECT_EQ(f.parents, (std::vector<std::string>{"f1", "f2"}));
  // (a, b, sum/mult, d, f_sel)
  ASSERT_EQ(f.params.size(), 5u);
  EXPECT_EQ(f.registers[f.params[3]].name, "d");
  EXPECT_EQ(f.registers[f.params[4]].name, "f_sel");
  EXPECT_EQ(CountOps(f, Opcode::kAdd), 1);
  EXPECT_EQ(CountOps(f, Opcode::kMul), 1);
  EXPECT_EQ(CountOps(f, Opcode::kCall), 1);
  const int fsel = f.params[4];
  const int a = f.params[0], d = f.params[3], sum = f.params[2];
  int add_select = 0, cond_select = 0;
  std::map<int, const ir::Instruction*> def;
  for (const auto& b : f.blocks) {
    for (const auto& i : b.instrs) {
      if (i.result >= 0) def[i.result] = &i;
    }
  }
  for (const auto& b : f.blocks) {
    for (const auto& i : b.instrs) {
      if (i.op == Opcode::kAdd) {
        const auto* s = def.at(i.operands[0].reg);
        ASSERT_EQ(s->op, Opcode::kSelect);
        EXPECT_EQ(s->operands[0].reg, fsel);
        EXPECT_EQ(s->operands[1].reg, a);
        EXPECT_EQ(s->operands[2].reg, d);
        ++add_select;
      }
      if (i.op == Opcode::kBr && i.operands[0].reg != fsel) {
        // The entry branch: f_sel ? sum : !mult, with sum and mult merged.
        const auto* s = def.at(i.operands[0].reg);
        ASSERT_EQ(s->op, Opcode::kSelect);
        EXPECT_EQ(s->operands[1].reg, sum);
        const auto* neg = def.at(s->operands[2].reg);
        EXPECT_EQ(neg->op, Opcode::kXor);
        EXPECT_EQ(neg->operands[0].reg, sum);
        ++cond_select;
      }
    }
  }
  EXPECT_EQ(add_select, 1);
  EXPECT_EQ(cond_select, 1);
  // Every edge into the call's block comes from a branch on f_sel, taken on
  // its true side.
  int call_block = -1;
  for (std::size_t b = 0; b < f.blocks.size(); ++b) {
    if (CountOps(ir::Function{.blocks = {f.blocks[b]}}, Opcode::kCall)) call_block = b;
  }
  ASSERT_GE(call_block, 0);
  int guarded = 0;
  for (const auto& b : f.blocks) {
    const auto& t = b.instrs.back();
    for (std::size_t k = 0; k < t.targets.size(); ++k) {
      if (t.targets[k] != call_block) continue;
      EXPECT_EQ(t.op, Opcode::kBr);
      EXPECT_EQ(t.operands[0].reg, fsel);
      EXPECT_EQ(k, 0u);
      ++guarded;
    }
  }
  EXPECT_GT(guarded, 0);
  auto rep = AddAndVerify(m, *res.merged);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.compared, 400);
}

TEST(MergeTest, CorpusPairsAreEquivalentAndCompact) {
  int verified = 0;
  for (const auto& prog : testing::CorpusPrograms()) {
    auto m = LoadCorpusModule(prog + ".ir");
    for (const auto& p : analysis::RankPairs(m)) {
      auto res = MergePair(m, p.first, p.second, MergedName(p.first, p.second));
      if (!res.merged) {
        EXPECT_EQ(res.diagnostic.find("validation"), std::string::npos) << res.diagnostic;
        continue;
      }
      const auto& mf = *res.merged;
      const auto& f1 = *m.Find(p.first);
      const auto& f2 = *m.Find(p.second);
      int size1 = f1.InstructionCount(), size2 = f2.InstructionCount();
      EXPECT_EQ(static_cast<int>(mf.function.InstructionCount()), mf.non_glue + mf.overhead.Total());
      EXPECT_LE(mf.function.InstructionCount(),
                static_cast<std::size_t>(size1 + size2 + mf.overhead.Total()));
      if (mf.alignment.AlignedCount() > 0) EXPECT_LT(mf.non_glue, size1 + size2);
      // Deterministic.
      auto again = MergePair(m, p.first, p.second, MergedName(p.first, p.second));
      EXPECT_EQ(again.merged->function, mf.function);
      auto rep = AddAndVerify(m, mf);
      EXPECT_TRUE(rep.passed) << prog << " " << p.first << "," << p.second;
      verified += rep.passed;
    }
  }
  EXPECT_GE(verified, 20);
}

TEST(MergeTest, ExtractedLoopsMerge) {
  auto m = analysis::ExtractLoops(LoadCorpusModule("vecops.ir")).module;
  auto res = MergePair(m, "vadd_loop0", "vsub_loop0", "l");
  ASSERT_TRUE(res.merged) << res.diagnostic;
  EXPECT_TRUE(AddAndVerify(m, *res.merged).passed);
}

TEST(MergeTest, RegisterConflictUnaligns) {
  // Aligning both adds would give %t and the pair %r, %s one register.
  auto m = ParseModule(R"(
func @p(%a: i64, %b: i64) -> i64 {
bb0:
  %r = add i64 %a, %b
  %s = add i64 %r, %b
  %s = mul i64 %s, %r
  ret i64 %s
}
func @q(%a: i64, %b: i64) -> i64 {
bb0:
  %t = add i64 %a, %b
  %t = add i64 %t, %b
  %t = mul i64 %t, %t
  ret i64 %t
}
)");
  auto res = MergePair(m, "p", "q", "pq");
  ASSERT_TRUE(res.merged) << res.diagnostic;
  EXPECT_LT(res.merged->alignment.AlignedCount(), 4);
  EXPECT_TRUE(AddAndVerify(m, *res.merged).passed);
}

TEST(MergeTest, Rejections) {
  auto m = LoadCorpusModule("fig5.ir");
  auto related = MergePair(m, "f1", "f3", "x");
  EXPECT_FALSE(related.merged);
  EXPECT_NE(related.diagnostic.find("calls"), std::string::npos);

  auto t = ParseModule(R"(
func @i(%a: i64) -> i64 { bb0: %b = add i64 %a, 1 ret i64 %b }
func @v(%a: i64) -> void { bb0: %b = add i64 %a, 1 ret }
)");
  auto types = MergePair(t, "i", "v", "x");
  EXPECT_FALSE(types.merged);
  EXPECT_NE(types.diagnostic.find("return types"), std::string::npos);

  // 24 adds against 24 fmuls: only ret aligns, 2 / 50 < 0.05.
  std::string a = "func @a(%x: i64) -> i64 { bb0: ", b = "func @b(%x: i64) -> i64 { bb0: %y = const f64 1.0 ";
  for (int k = 0; k < 24; ++k) a += "%x = add i64 %x, 1 ";
  for (int k = 0; k < 23; ++k) b += "%y = fmul f64 %y, 2.0 ";
  a += "ret i64 %x }\n";
  b += "ret i64 %x }\n";
  auto low = ParseModule(a + b);
  auto res = MergePair(low, "a", "b", "x");
  EXPECT_FALSE(res.merged);
  EXPECT_LT(res.alignment.AlignedFraction(), 0.05);
  EXPECT_NE(res.diagnostic.find("below"), std::string::npos);
}

TEST(VerifyTest, SwappedSelectArmsAreCaught) {
  auto m = LoadCorpusModule("fig5.ir");
  auto res = MergePair(m, "f1", "f2", "f12");
  ASSERT_TRUE(res.merged);
  ir::Function bad = res.merged->function;
  bool swapped = false;
  for (auto& b : bad.blocks) {
    for (auto& i : b.instrs) {
      if (!swapped && i.op == Opcode::kSelect && i.operands[1].is_reg() && i.operands[2].is_reg() &&
          bad.registers[i.operands[1].reg].name == "a") {
        std::swap(i.operands[1], i.operands[2]);
        swapped = true;
      }
    }
  }
  ASSERT_TRUE(swapped);
  m.AddFunction(bad);
  auto rep = VerifyMerge(m, "f1", "f2", "f12");
  EXPECT_FALSE(rep.passed);
  ASSERT_TRUE(rep.counterexample);
  EXPECT_NE(rep.counterexample->expected, rep.counterexample->actual);
  // Replaying the counterexample reproduces the difference.
  auto want = ir::RunForOutcome(m, rep.counterexample->side == 1 ? "f1" : "f2",
                                rep.counterexample->parent_input);
  auto got = ir::RunForOutcome(m, "f12", rep.counterexample->merged_input);
  EXPECT_NE(want, got);
}

TEST(VerifyTest, SelfMergePasses) {
  auto m = LoadCorpusModule("hash.ir");
  ir::Function copy = *m.Find("djb2");
  copy.name = "djb2_b";
  m.AddFunction(copy);
  auto res = MergePair(m, "djb2", "djb2_b", "dd");
  ASSERT_TRUE(res.merged);
  auto rep = AddAndVerify(m, *res.merged);
  EXPECT_TRUE(rep.passed);
  EXPECT_FALSE(rep.counterexample);
}

TEST(CallAdapterTest, Fig5Sides) {
  auto m = LoadCorpusModule("fig5.ir");
  const auto& f1 = *m.Find("f1");
  const auto& f2 = *m.Find("f2");
  auto pm = MergeParameters(f1, f2);
  auto one = CallAdapter::ForSide(f1, f2, pm, 1).Apply(testing::Args(
      {ir::Literal::Int(2), ir::Literal::Int(3), ir::Literal::Bool(true)}));
  ASSERT_EQ(one.args.size(), 5u);
  EXPECT_EQ(one.args[3].literal, ir::Literal::Int(0));
  EXPECT_EQ(one.args[4].literal, ir::Literal::Bool(true));
  auto two = CallAdapter::ForSide(f1, f2, pm, 2).Apply(testing::Args(
      {ir::Literal::Int(2), ir::Literal::Int(3), ir::Literal::Int(7), ir::Literal::Bool(true)}));
  EXPECT_EQ(two.args[2].literal, ir::Literal::Bool(true));
  EXPECT_EQ(two.args[3].literal, ir::Literal::Int(7));
  EXPECT_EQ(two.args[4].literal, ir::Literal::Bool(false));
}

TEST(CallAdapterTest, DepthTwoMergeComposes) {
  auto m = LoadCorpusModule("vecops.ir");
  auto r12 = MergePair(m, "vadd", "vsub", "m12");
  auto r34 = MergePair(m, "vmul", "vmax", "m34");
  ASSERT_TRUE(r12.merged && r34.merged);
  m.AddFunction(r12.merged->function);
  m.AddFunction(r34.merged->function);
  auto r1234 = MergePair(m, "m12", "m34", "m1234");
  ASSERT_TRUE(r1234.merged) << r1234.diagnostic;
  m.AddFunction(r1234.merged->function);
  EXPECT_TRUE(VerifyMerge(m, "m12", "m34", "m1234").passed);
  // Calling m1234 through the composed adapter behaves like each original.
  const std::pair<const char*, int> originals[] = {{"vadd", 1}, {"vsub", 2}, {"vmul", 1}, {"vmax", 2}};
  std::mt19937_64 rng(5);
  for (auto [name, side] : originals) {
    bool first_pair = std::string(name) == "vadd" || std::string(name) == "vsub";
    const auto& inner1 = *m.Find(first_pair ? "vadd" : "vmul");
    const auto& inner2 = *m.Find(first_pair ? "vsub" : "vmax");
    auto inner = CallAdapter::ForSide(inner1, inner2, MergeParameters(inner1, inner2), side);
    const auto& o1 = *m.Find("m12");
    const auto& o2 = *m.Find("m34");
    auto outer = CallAdapter::ForSide(o1, o2, MergeParameters(o1, o2), first_pair ? 1 : 2);
    auto adapter = inner.Then(outer);
    for (int t = 0; t < 50; ++t) {
      auto inv = ir::RandomInvocation(*m.Find(name), rng);
      EXPECT_EQ(ir::RunForOutcome(m, name, inv), ir::RunForOutcome(m, "m1234", adapter.Apply(inv)))
          << name;
    }
  }
}

}  // namespace
}  // namespace mergedse::merge
