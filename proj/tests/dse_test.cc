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

#include "mergedse/dse/dse.h"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include "fmt/core.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "mergedse/analysis/call_graph.h"
#include "mergedse/analysis/loop_extraction.h"
#include "mergedse/cost/oracle.h"
#include "mergedse/ir/text.h"
#include "test_util.h"

namespace mergedse::dse {
namespace {

using testing::CorpusPrograms;
using testing::LoadCorpusInputs;
using testing::LoadCorpusModule;

constexpr double kInf = std::numeric_limits<double>::infinity();

// A cheap model; these tests only need areas that are positive and finite.
const cost::AreaModel& TestModel() {
  static const cost::AreaModel model = cost::TrainLasso(cost::GenerateDataset(200, 3));
  return model;
}

// Prepared configurations are shared across tests.
const PreparedConfiguration& Prepared(const std::string& program, Configuration c) {
  static std::mutex mu;
  static std::map<std::pair<std::string, Configuration>, PreparedConfiguration> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(program, c);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache
             .emplace(key, Prepare(LoadCorpusModule(program + ".ir"),
                                   LoadCorpusInputs(program + ".heap"), c, TestModel(), {}))
             .first;
  }
  return it->second;
}

TEST(ConfigTest, NamesRoundTrip) {
  for (Configuration c : kAllConfigurations) {
    EXPECT_EQ(ParseConfiguration(ConfigurationName(c)), c);
  }
  EXPECT_EQ(ConfigurationName(Configuration::kFLEMerging), "FLE+Merging");
  EXPECT_FALSE(ParseConfiguration("FE+FLE").has_value());
}

TEST(ConfigTest, ValidateNamesTheField) {
  auto message = [](auto mutate) {
    PipelineConfig cfg;
    mutate(cfg);
    try {
      cfg.Validate();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message([](PipelineConfig& c) { c.area_budget = -1; }).find("area_budget"),
            std::string::npos);
  EXPECT_NE(message([](PipelineConfig& c) { c.interconnect.latency_cycles = -3; }).find("latency"),
            std::string::npos);
  EXPECT_NE(message([](PipelineConfig& c) { c.interconnect.clock_seconds = -1; }).find("clock"),
            std::string::npos);
  EXPECT_NE(message([](PipelineConfig& c) { c.merge_depth = 3; }).find("merge_depth"),
            std::string::npos);
  EXPECT_EQ(message([](PipelineConfig&) {}), "");
}

constexpr char kHot[] = R"(
entry @main
func @hot(%n: i64) -> i64 {
entry:
  %i = const i64 0
  %s = const i64 0
  jmp head
head:
  %t = icmp slt i64 %i, %n
  br %t, body, done
body:
  %q = mul i64 %i, %i
  %s = add i64 %s, %q
  %i = add i64 %i, 1
  jmp head
done:
  ret i64 %s
}
func @main(%n: i64) -> i64 {
entry:
  %a = call i64 @hot(%n)
  %b = call i64 @hot(%n)
  %c = add i64 %a, %b
  ret i64 %c
}
)";

TEST(PipelineTest, HandComputedHotFunction) {
  auto m = ir::ParseModule(kHot);
  std::vector<ir::Invocation> in{testing::Args({ir::Literal::Int(100)})};
  // Counted by hand with n = 100 and two calls. Software, per call:
  // 2 const + jmp + 101 (icmp + br) + 100 (mul + add + add + jmp) + ret
  // = 2 + 1 + 202 + 600 + 1 = 806 cycles. Hardware drops jmp, br and ret:
  // 2 + 101 + 500 = 603. main: 2 calls at 10, add, ret = 22.
  const double sw_total = 22 + 2 * 806, hw_rest = 22 + 2 * 603;
  PipelineConfig cfg;
  cfg.configurations = {Configuration::kFE};
  cfg.area_budget = 1e9;
  for (double bw : {kInf, 1e9}) {
    cfg.interconnect.bandwidth_bps = bw;
    // 25 cycles per call; 16 bytes per call (argument and result).
    double frontier = 2 * 25 + (std::isinf(bw) ? 0 : 2 * 16 * 1e9 / bw);
    auto r = RunPipeline(m, in, cfg, TestModel());
    ASSERT_EQ(r.points.size(), 1u);
    const auto& p = r.points[0];
    EXPECT_EQ(p.hardware_original, std::vector<std::string>{"hot"});
    EXPECT_EQ(p.software, std::vector<std::string>{"main"});
    EXPECT_EQ(p.objective_ps, static_cast<int64_t>((hw_rest + frontier) * 1000));
    EXPECT_DOUBLE_EQ(p.speedup, sw_total / (hw_rest + frontier));
    EXPECT_EQ(p.communication_ps, static_cast<int64_t>(frontier * 1000));
  }
}

TEST(PipelineTest, RejectsProgramsThatTrap) {
  auto m = ir::ParseModule(R"(
entry @main
func @main(%n: i64) -> i64 {
entry:
  %q = sdiv i64 1, %n
  ret i64 %q
}
)");
  std::vector<ir::Invocation> in{testing::Args({ir::Literal::Int(0)})};
  EXPECT_THROW(RunPipeline(m, in, {}, TestModel()), DseError);
  EXPECT_THROW(RunPipeline(m, {}, {}, TestModel()), DseError);
}

TEST(PipelineTest, ZeroBudgetIsTheBaseline) {
  for (const auto& prog : CorpusPrograms()) {
    for (Configuration c : kAllConfigurations) {
      auto r = EvaluatePoint(Prepared(prog, c), 0, {});
      EXPECT_EQ(r.speedup, 1.0) << prog << " " << ConfigurationName(c);
      EXPECT_EQ(r.objective_ps, r.baseline_ps);
      EXPECT_EQ(r.software_pct, 100.0);
      EXPECT_TRUE(r.hardware_merged.empty() && r.hardware_original.empty());
    }
  }
}

TEST(PipelineTest, MergingNeverHurtsAndBudgetHelps) {
  auto grid = SweepGrid::Presets();
  for (const auto& prog : CorpusPrograms()) {
    for (double lat : grid.latencies) {
      for (double bw : grid.bandwidths) {
        partition::Interconnect ic{lat, bw, 1e-9};
        for (auto [plain, merged] : {std::pair{Configuration::kFE, Configuration::kFEMerging},
                                     std::pair{Configuration::kFLE, Configuration::kFLEMerging}}) {
          double last_plain = 0, last_merged = 0;
          for (double b : grid.budgets) {
            auto rp = EvaluatePoint(Prepared(prog, plain), b, ic);
            auto rm = EvaluatePoint(Prepared(prog, merged), b, ic);
            SCOPED_TRACE(fmt::format("{} {} b={} lat={} bw={}", prog, ConfigurationName(plain), b,
                                     lat, bw));
            EXPECT_LE(rm.objective_ps, rp.objective_ps);
            EXPECT_GE(rp.speedup, last_plain);
            EXPECT_GE(rm.speedup, last_merged);
            last_plain = rp.speedup;
            last_merged = rm.speedup;
            for (const auto* r : {&rp, &rm}) {
              EXPECT_EQ(r->software_ps + r->hardware_ps + r->communication_ps, r->objective_ps);
              EXPECT_NEAR(r->software_pct + r->hardware_pct + r->communication_pct, 100.0, 0.1);
              EXPECT_TRUE(r->optimal);
            }
          }
        }
      }
    }
  }
}

TEST(PipelineTest, FunnelAndVerificationRecords) {
  int depth2 = 0, selected_merged = 0;
  for (const auto& prog : CorpusPrograms()) {
    for (Configuration c : {Configuration::kFEMerging, Configuration::kFLEMerging}) {
      const auto& prep = Prepared(prog, c);
      const Funnel& f = prep.funnel;
      SCOPED_TRACE(prog + " " + std::string(ConfigurationName(c)));
      EXPECT_GE(f.ranked, f.aligned);
      EXPECT_GE(f.aligned, f.verified);
      EXPECT_GE(f.verified, f.area_win);
      EXPECT_GE(f.area_win, f.ep_positive);
      EXPECT_GE(f.ep_positive, f.candidates);
      EXPECT_EQ(f.candidates, static_cast<int>(prep.candidates.size()));
      EXPECT_EQ(static_cast<int>(prep.verification.size()), f.aligned);
      std::set<std::string> good;
      for (const auto& v : prep.verification) {
        if (v.passed && v.end_to_end) good.insert(v.function);
        EXPECT_EQ(v.compared + v.inconclusive, 2 * 200) << v.function;
      }
      for (const auto& k : prep.candidates) {
        EXPECT_TRUE(good.count(k.name)) << k.name;
        EXPECT_GT(k.ep, 0);
        EXPECT_LT(k.area, k.parents_area);
        depth2 += k.depth == 2;
      }
      for (double b : SweepGrid::Presets().budgets) {
        auto r = EvaluatePoint(prep, b, {});
        EXPECT_LE(r.MergedSelected(), f.candidates);
        for (const auto& h : r.hardware_merged) EXPECT_TRUE(good.count(h)) << h;
        selected_merged += r.MergedSelected();
      }
    }
  }
  EXPECT_GT(depth2, 0);
  EXPECT_GT(selected_merged, 0);
}

TEST(PipelineTest, ExtractionKeepsProgramOutcomes) {
  for (const auto& prog : CorpusPrograms()) {
    const auto& fe = Prepared(prog, Configuration::kFE);
    const auto& fle = Prepared(prog, Configuration::kFLE);
    for (const auto& inv : LoadCorpusInputs(prog + ".heap")) {
      EXPECT_EQ(ir::RunForOutcome(fe.module, fe.module.entry(), inv),
                ir::RunForOutcome(fle.module, fle.module.entry(), inv))
          << prog;
    }
    // Both baselines are the same program's all-software time; the FLE one
    // also pays for the calls into the outlined loops.
    EXPECT_GE(fle.baseline_ps, fe.baseline_ps) << prog;
  }
}

TEST(PipelineTest, CommunicationShareGrowsWithLatency) {
  for (const auto& prog : CorpusPrograms()) {
    const auto& prep = Prepared(prog, Configuration::kFEMerging);
    for (double b : SweepGrid::Presets().budgets) {
      partition::Interconnect lo{25, 1e9, 1e-9}, hi{500, 1e9, 1e-9};
      auto pl = partition::BuildProblem(prep.module, prep.costs, prep.trace, lo, b);
      auto ph = partition::BuildProblem(prep.module, prep.costs, prep.trace, hi, b);
      auto s = partition::Solve(pl);
      auto at_hi = partition::Evaluate(ph, s.placement);
      auto pct = [](const partition::PartitionSolution& x) {
        return x.objective_ps ? static_cast<double>(x.communication_ps) / x.objective_ps : 0.0;
      };
      EXPECT_GE(pct(at_hi), pct(s)) << prog << " " << b;
    }
  }
}

// With free communication the partition reduces to picking a set of
// original functions closed under callees, within the budget, that saves
// the most time. Enumerated directly.
int64_t ClosedSetOracle(const PreparedConfiguration& prep, double budget) {
  auto p = partition::BuildProblem(prep.module, prep.costs, prep.trace, {0, kInf, 1e-9}, budget);
  auto cg = analysis::BuildCallGraph(prep.module);
  std::vector<int> items;
  for (int i = 0; i < static_cast<int>(p.nodes.size()); ++i) {
    if (!p.nodes[i].merged && p.nodes[i].name != prep.module.entry()) items.push_back(i);
  }
  EXPECT_LE(items.size(), 16u);
  int64_t base = 0;
  for (const auto& v : p.nodes) base += v.merged ? 0 : v.sw_ps;
  int64_t best = base;
  for (uint32_t mask = 1; mask < (1u << items.size()); ++mask) {
    std::set<std::string> chosen;
    int64_t area = 0, saved = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (!(mask >> k & 1)) continue;
      const auto& v = p.nodes[items[k]];
      chosen.insert(v.name);
      area += v.area;
      saved += v.sw_ps - v.hw_ps;
    }
    if (area > p.area_budget) continue;
    bool closed = true;
    for (const auto& f : chosen) {
      for (const auto& c : cg.TransitiveCallees(f)) closed &= chosen.count(c) > 0;
    }
    if (closed) best = std::min(best, base - saved);
  }
  return best;
}

TEST(PipelineTest, FreeCommunicationMatchesClosedSetOracle) {
  for (const auto& prog : CorpusPrograms()) {
    for (Configuration c : {Configuration::kFE, Configuration::kFLE}) {
      const auto& prep = Prepared(prog, c);
      for (double b : SweepGrid::Presets().budgets) {
        auto r = EvaluatePoint(prep, b, {0, kInf, 1e-9});
        EXPECT_EQ(r.objective_ps, ClosedSetOracle(prep, b))
            << prog << " " << ConfigurationName(c) << " " << b;
        EXPECT_EQ(r.communication_ps, 0);
      }
    }
  }
}

TEST(SweepTest, RowCountsAndHeaderOnlyWhenEmpty) {
  auto m = LoadCorpusModule("vecops.ir");
  auto in = LoadCorpusInputs("vecops.heap");
  PipelineConfig cfg;
  SweepGrid none{{}, {25}, {kInf}};
  EXPECT_EQ(ReportCsv(Sweep(m, in, none, cfg, TestModel())), std::string(kCsvHeader) + "\n");
  SweepGrid three{{1e3, 1e4, 1e5}, {25}, {kInf}};
  auto r = Sweep(m, in, three, cfg, TestModel());
  std::string csv = ReportCsv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 4);
  EXPECT_NE(csv.find("\nFE+Merging,1000,25,inf,"), std::string::npos);
}

TEST(SweepTest, RejectsNegativeGridValues) {
  auto m = LoadCorpusModule("fig5.ir");
  auto in = LoadCorpusInputs("fig5.heap");
  EXPECT_THROW(Sweep(m, in, {{-1}, {25}, {kInf}}, {}, TestModel()), std::invalid_argument);
  EXPECT_THROW(Sweep(m, in, {{1}, {-25}, {kInf}}, {}, TestModel()), std::invalid_argument);
  EXPECT_THROW(Sweep(m, in, {{1}, {25}, {0}}, {}, TestModel()), std::invalid_argument);
}

TEST(SweepTest, IndependentOfWorkerCount) {
  auto m = LoadCorpusModule("hash.ir");
  auto in = LoadCorpusInputs("hash.heap");
  auto grid = SweepGrid::Presets();
  auto a = Sweep(m, in, grid, {}, TestModel(), 1);
  auto b = Sweep(m, in, grid, {}, TestModel(), 4);
  EXPECT_EQ(ReportCsv(a), ReportCsv(b));
  EXPECT_EQ(ReportJson(a), ReportJson(b));
  EXPECT_EQ(a.points.size(), 4 * grid.size());
}

TEST(ReportTest, JsonPassesTheValidator) {
  for (const auto& prog : {"image", "sortsearch"}) {
    auto r = Sweep(LoadCorpusModule(std::string(prog) + ".ir"),
                   LoadCorpusInputs(std::string(prog) + ".heap"), SweepGrid::Presets(), {},
                   TestModel(), 2);
    r.program = prog;
    auto errs = ValidateReportJson(ReportJson(r));
    EXPECT_TRUE(errs.empty()) << errs.front();
  }
}

TEST(ReportTest, ValidatorCatchesBrokenReports) {
  auto r = Sweep(LoadCorpusModule("vecops.ir"), LoadCorpusInputs("vecops.heap"),
                 {{1e4, 1e5}, {25}, {kInf}}, {}, TestModel());
  auto j = nlohmann::json::parse(ReportJson(r));
  ASSERT_TRUE(ValidateReportJson(j.dump()).empty());

  auto broken = [&](auto mutate) {
    auto k = j;
    mutate(k);
    return ValidateReportJson(k.dump());
  };
  EXPECT_FALSE(broken([](auto& k) { k["schema"] = "dse-report/v0"; }).empty());
  EXPECT_FALSE(broken([](auto& k) { k.erase("points"); }).empty());
  EXPECT_FALSE(broken([](auto& k) { k["points"][0]["breakdown"]["software_pct"] = 50.0; }).empty());
  EXPECT_FALSE(broken([](auto& k) { k["points"][0]["speedup"] = -1.0; }).empty());
  EXPECT_FALSE(broken([](auto& k) { k["points"][0]["time_ps"]["hardware"] = 1; }).empty());
  EXPECT_FALSE(broken([](auto& k) {
                 for (auto& p : k["points"]) {
                   p["hardware_merged"].push_back("not_verified");
                   p["n_merged_selected"] = p["hardware_merged"].size();
                 }
               }).empty());
  EXPECT_FALSE(broken([](auto& k) { k["configurations"][2]["funnel"]["aligned"] = 1000; }).empty());
  EXPECT_FALSE(ValidateReportJson("{not json").empty());
}

TEST(ReportTest, InfiniteBandwidthIsNullInJson) {
  auto r = Sweep(LoadCorpusModule("fig5.ir"), LoadCorpusInputs("fig5.heap"),
                 {{1e4}, {25}, {kInf, 1e9}}, {}, TestModel());
  auto j = nlohmann::json::parse(ReportJson(r));
  EXPECT_TRUE(j["points"][0]["bandwidth_bps"].is_null());
  EXPECT_EQ(j["points"][1]["bandwidth_bps"], 1e9);
}

TEST(ReportTest, RepeatedRunsAreByteIdentical) {
  auto m = LoadCorpusModule("decoder.ir");
  auto in = LoadCorpusInputs("decoder.heap");
  auto a = RunPipeline(m, in, {}, TestModel());
  auto b = RunPipeline(m, in, {}, TestModel());
  EXPECT_EQ(ReportJson(a), ReportJson(b));
  EXPECT_EQ(ReportCsv(a), ReportCsv(b));
}

}  // namespace
}  // namespace mergedse::dse
