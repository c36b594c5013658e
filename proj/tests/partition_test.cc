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

#include <chrono>

#include "gtest/gtest.h"
#include "mergedse/ir/interpreter.h"
#include "mergedse/merge/merger.h"
#include "mergedse/partition/partition.h"
#include "partition_instances.h"
#include "test_util.h"

namespace mergedse::partition {
namespace {

using testing::RandomInstance;

PartitionProblem::Node Fn(const std::string& name, int64_t sw, int64_t hw, int64_t area) {
  PartitionProblem::Node v;
  v.name = name;
  v.sw_ps = sw;
  v.hw_ps = hw;
  v.area = area;
  return v;
}

PartitionProblem::Node Merged(const std::string& name, int a, int b, int64_t hw, int64_t area) {
  PartitionProblem::Node v = Fn(name, 0, hw, area);
  v.merged = true;
  v.parents = {a, b};
  return v;
}

// f1, f2 and their merge f12.
PartitionProblem TwoAndChild(int64_t budget, int64_t hw12) {
  PartitionProblem p;
  p.nodes = {Fn("f1", 100, 10, 60), Fn("f2", 80, 10, 50), Merged("f12", 0, 1, hw12, 70)};
  p.area_budget = budget;
  p.Finalize();
  return p;
}

TEST(ProblemTest, MergeGraphSets) {
  PartitionProblem p;
  p.nodes = {Fn("f1", 1, 1, 1), Fn("f2", 1, 1, 1), Fn("f3", 1, 1, 1), Fn("f4", 1, 1, 1),
             Merged("f12", 0, 1, 1, 1), Merged("f34", 2, 3, 1, 1), Merged("f1234", 4, 5, 1, 1)};
  p.Finalize();
  EXPECT_EQ(p.descend[0], (std::vector<int>{4, 6}));
  EXPECT_EQ(p.descend[4], std::vector<int>{6});
  EXPECT_TRUE(p.descend[6].empty());
  EXPECT_EQ(p.root, (std::vector<bool>{true, true, true, true, false, false, false}));
  EXPECT_EQ(p.root_ancestors[6], (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(p.root_ancestors[4], (std::vector<int>{0, 1}));
}

TEST(ProblemTest, RejectsMalformedInstances) {
  PartitionProblem cyc;
  cyc.nodes = {Fn("a", 1, 1, 1), Fn("b", 1, 1, 1)};
  cyc.nodes[0].callees = {1};
  cyc.nodes[1].callees = {0};
  EXPECT_THROW(cyc.Finalize(), PartitionError);
  PartitionProblem neg;
  neg.nodes = {Fn("a", -1, 1, 1)};
  EXPECT_THROW(neg.Finalize(), PartitionError);
  PartitionProblem one_parent;
  one_parent.nodes = {Fn("a", 1, 1, 1), Fn("m", 0, 1, 1)};
  one_parent.nodes[1].merged = true;
  one_parent.nodes[1].parents = {0};
  EXPECT_THROW(one_parent.Finalize(), PartitionError);
}

TEST(SolveTest, ZeroBudgetIsAllSoftware) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto p = RandomInstance(seed, {}, 0);
    auto s = Solve(p);
    int64_t sw = 0;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      if (p.root[i]) {
        EXPECT_EQ(s.placement[i], Placement::kSoftware);
        sw += p.nodes[i].sw_ps;
      } else {
        EXPECT_EQ(s.placement[i], Placement::kNone);
      }
    }
    EXPECT_EQ(s.objective_ps, sw);
    EXPECT_EQ(s.communication_ps, 0);
  }
}

TEST(SolveTest, AmpleBudgetFastHardwareIsAllHardware) {
  PartitionProblem p;
  p.nodes = {Fn("a", 100, 10, 5), Fn("b", 50, 20, 5), Fn("c", 30, 1, 5)};
  p.nodes[0].callees = {1, 2};
  p.nodes[1].callees = {2};
  p.edges = {{0, 1, 5, 0, 0}, {1, 2, 5, 0, 0}};
  p.area_budget = 15;
  p.Finalize();
  auto s = Solve(p);
  EXPECT_EQ(s.placement, std::vector<Placement>(3, Placement::kHardware));
  EXPECT_EQ(s.objective_ps, 31);
}

TEST(SolveTest, OnlyTheMergedChildFits) {
  // area12 = 70 < 60 + 50; only the child fits in 75 LUTs.
  auto p = TwoAndChild(75, 25);
  auto s = Solve(p);
  EXPECT_EQ(s.placement,
            (std::vector<Placement>{Placement::kNone, Placement::kNone, Placement::kHardware}));
  EXPECT_EQ(s.objective_ps, 25);
  EXPECT_EQ(SolveBruteForce(p).objective_ps, 25);
  EXPECT_EQ(s.HardwareMerged(p), std::vector<std::string>{"f12"});
}

TEST(SolveTest, AmpleBudgetPrefersParents) {
  // Both parents fit and hw1 + hw2 < hw12.
  auto p = TwoAndChild(200, 25);
  auto s = Solve(p);
  EXPECT_EQ(s.placement, (std::vector<Placement>{Placement::kHardware, Placement::kHardware,
                                                 Placement::kNone}));
  EXPECT_EQ(s.objective_ps, 20);
  EXPECT_EQ(s.HardwareOriginal(p), (std::vector<std::string>{"f1", "f2"}));
}

TEST(CheckTest, ReportsViolations) {
  auto p = TwoAndChild(1000, 25);
  auto both = Evaluate(p, {Placement::kSoftware, Placement::kHardware, Placement::kHardware});
  auto v = CheckSolution(p, both);
  EXPECT_EQ(v, (std::vector<std::string>{"root-coverage[@f1]: realized 2 times",
                                         "root-coverage[@f2]: realized 2 times"}));

  PartitionProblem q;
  q.nodes = {Fn("caller", 10, 1, 1), Fn("callee", 10, 1, 1)};
  q.nodes[0].callees = {1};
  q.area_budget = 10;
  q.Finalize();
  auto bad = Evaluate(q, {Placement::kHardware, Placement::kSoftware});
  ASSERT_EQ(CheckSolution(q, bad).size(), 1u);
  EXPECT_EQ(CheckSolution(q, bad)[0], "callee-in-hardware[@caller -> @callee]");
  auto over = Evaluate(q, {Placement::kHardware, Placement::kHardware});
  q.area_budget = 1;
  EXPECT_NE(CheckSolution(q, over)[0].find("area-budget"), std::string::npos);
  over.objective_ps += 1;
  EXPECT_EQ(CheckSolution(q, over).size(), 2u);
}

TEST(SolveTest, MatchesBruteForce) {
  int with_depth_two = 0;
  for (uint64_t seed = 0; seed < 250; ++seed) {
    auto p = RandomInstance(seed);
    auto fast = Solve(p);
    auto slow = SolveBruteForce(p);
    ASSERT_TRUE(fast.optimal);
    EXPECT_EQ(fast.objective_ps, slow.objective_ps) << "seed " << seed;
    EXPECT_TRUE(CheckSolution(p, fast).empty()) << "seed " << seed;
    EXPECT_TRUE(CheckSolution(p, slow).empty());
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      with_depth_two += p.nodes[i].merged && !p.root[p.nodes[i].parents[0]];
    }
  }
  EXPECT_GT(with_depth_two, 10);
}

TEST(SolveTest, LargerInstancesAreFeasible) {
  testing::InstanceShape shape{.min_roots = 15, .max_roots = 40, .max_merged = 15, .max_nodes = 55};
  for (uint64_t seed = 0; seed < 500; ++seed) {
    auto p = RandomInstance(1000 + seed, shape);
    auto s = Solve(p);
    EXPECT_TRUE(s.optimal);
    EXPECT_TRUE(CheckSolution(p, s).empty()) << seed;
  }
}

TEST(SolveTest, NodeLimitReturnsBestFound) {
  auto p = RandomInstance(7, {.min_roots = 10, .max_roots = 10});
  auto s = Solve(p, {.node_limit = 2});
  EXPECT_FALSE(s.optimal);
  EXPECT_TRUE(CheckSolution(p, s).empty());
}

TEST(SolveTest, BudgetMonotonicity) {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    auto p = RandomInstance(seed, {}, 0);
    int64_t total = 0;
    for (const auto& v : p.nodes) total += v.area;
    int64_t prev = std::numeric_limits<int64_t>::max();
    for (int step = 0; step <= 10; ++step) {
      p.area_budget = total * step / 10;
      auto s = Solve(p);
      EXPECT_LE(s.objective_ps, prev);
      prev = s.objective_ps;
    }
  }
}

TEST(SolveTest, MergedCandidatesNeverHurt) {
  for (uint64_t seed = 0; seed < 150; ++seed) {
    auto p = RandomInstance(seed);
    // The same instance without merged nodes and their edges.
    PartitionProblem q;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      if (!p.nodes[i].merged) q.nodes.push_back(p.nodes[i]);
    }
    for (const auto& e : p.edges) {
      if (!p.nodes[e.callee].merged) q.edges.push_back(e);
    }
    q.area_budget = p.area_budget;
    q.entry = p.entry;
    q.Finalize();
    EXPECT_LE(Solve(p).objective_ps, Solve(q).objective_ps) << seed;
  }
}

TEST(SolveTest, FrontierOnlyOnCrossingEdges) {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto p = RandomInstance(seed);
    auto s = Solve(p);
    int64_t comm = 0;
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
      const auto& edge = p.edges[e];
      bool crossing = s.placement[edge.caller] == Placement::kSoftware &&
                      s.placement[edge.callee] == Placement::kHardware;
      EXPECT_EQ(s.frontier[e], crossing);
      if (crossing) comm += edge.cost_ps;
    }
    EXPECT_EQ(s.communication_ps, comm);
    EXPECT_EQ(s.objective_ps, s.software_ps + s.hardware_ps + s.communication_ps);
  }
}

TEST(SolveTest, WithoutCallsOrMergesIsAKnapsack) {
  testing::InstanceShape shape{.min_roots = 3, .max_roots = 25, .max_merged = 0,
                               .call_probability = 0, .with_entry = false};
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto p = RandomInstance(seed, shape);
    std::vector<int64_t> area, savings;
    int64_t sw = 0;
    for (const auto& v : p.nodes) {
      area.push_back(v.area);
      savings.push_back(v.sw_ps - v.hw_ps);
      sw += v.sw_ps;
    }
    EXPECT_EQ(Solve(p).objective_ps,
              sw - testing::KnapsackBestSavings(area, savings, p.area_budget));
  }
}

TEST(BuildTest, Fig5WithMergedChild) {
  auto m = testing::LoadCorpusModule("fig5.ir");
  auto merged = merge::MergePair(m, "f1", "f2", "f12");
  ASSERT_TRUE(merged.merged);
  m.AddFunction(merged.merged->function);
  ir::Trace trace;
  for (const auto& inv : testing::LoadCorpusInputs("fig5.heap")) {
    trace.Accumulate(ir::Interpret(m, m.entry(), inv).trace);
  }
  std::map<std::string, FunctionCost> costs;
  for (const auto& f : m.functions()) costs[f.name] = {1e-6, 5e-7, 100};
  Interconnect ic{.latency_cycles = 10, .bandwidth_bps = 1e9, .clock_seconds = 1e-9};
  auto p = BuildProblem(m, costs, trace, ic, 500);
  int f1 = p.Find("f1"), f2 = p.Find("f2"), f3 = p.Find("f3"), f12 = p.Find("f12");
  int main = p.Find("main");
  EXPECT_EQ(p.descend[f1], std::vector<int>{f12});
  EXPECT_EQ(p.descend[f2], std::vector<int>{f12});
  EXPECT_FALSE(p.root[f12]);
  EXPECT_TRUE(p.root[f1] && p.root[f2] && p.root[f3] && p.root[main]);
  EXPECT_EQ(p.entry, main);
  EXPECT_EQ(p.area_budget, 500);
  auto edge = [&](int a, int b) -> const PartitionProblem::Edge* {
    for (const auto& e : p.edges) {
      if (e.caller == a && e.callee == b) return &e;
    }
    return nullptr;
  };
  ASSERT_TRUE(edge(main, f1) && edge(main, f2) && edge(main, f12));
  EXPECT_EQ(edge(main, f12)->calls, edge(main, f1)->calls + edge(main, f2)->calls);
  EXPECT_EQ(edge(main, f12)->bytes, edge(main, f1)->bytes + edge(main, f2)->bytes);
  const auto* e = edge(main, f1);
  EXPECT_EQ(e->cost_ps, ToPicoseconds(e->calls * 10 * 1e-9 + e->bytes / 1e9));
  EXPECT_EQ(std::vector<int>(p.nodes[f12].callees), std::vector<int>{f3});
  auto s = Solve(p);
  EXPECT_TRUE(CheckSolution(p, s).empty());
  EXPECT_EQ(s.placement[main], Placement::kSoftware);

  costs.erase("f3");
  EXPECT_THROW(BuildProblem(m, costs, trace, ic, 500), PartitionError);
}

TEST(BuildTest, InfiniteBandwidthDropsBytes) {
  PartitionProblem p;
  p.nodes = {Fn("a", 1, 1, 1), Fn("b", 1, 1, 1)};
  p.nodes[0].callees = {1};
  p.edges = {{0, 1, 3, 4000, 0}};
  p.Finalize();
  p.ApplyInterconnect({.latency_cycles = 25, .clock_seconds = 1e-9});
  EXPECT_EQ(p.edges[0].cost_ps, 75000);
  p.ApplyInterconnect({.latency_cycles = 0, .bandwidth_bps = 4e9, .clock_seconds = 1e-9});
  EXPECT_EQ(p.edges[0].cost_ps, 1000000);
  EXPECT_THROW(p.ApplyInterconnect({.latency_cycles = -1}), PartitionError);
}

}  // namespace
}  // namespace mergedse::partition
