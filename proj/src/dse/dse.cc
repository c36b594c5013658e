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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "fmt/core.h"
#include "json.hpp"
#include "mergedse/analysis/call_graph.h"
#include "mergedse/analysis/fingerprint.h"
#include "mergedse/analysis/loop_extraction.h"
#include "mergedse/cost/features.h"
#include "mergedse/cost/oracle.h"
#include "mergedse/ir/validator.h"
#include "mergedse/merge/verify.h"
#include "spdlog/spdlog.h"

namespace mergedse::dse {
namespace {

using nlohmann::ordered_json;

// Runs fn(0..n-1) on up to `jobs` threads.
template <typename Fn>
void ParallelFor(std::size_t n, int jobs, Fn fn) {
  std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// A function that can take part in a merge: an original, or a merged
// function standing for several original roots.
struct Item {
  std::string name;
  std::vector<std::string> roots;
  // Maps a root's arguments onto this function's; empty for originals.
  std::map<std::string, merge::CallAdapter> adapters;
  std::vector<ir::Function> chain;  // merged functions this one needs, itself last
  double sw = 0;  // inclusive, summed over roots
  double hw = 0;  // inclusive
  double area = 0;
  double ep = 0;
  partition::FunctionCost cost;
  Candidate info;
};

struct Context {
  const ir::Module& base;
  const std::vector<ir::Invocation>& inputs;
  const std::vector<ir::Outcome>& outcomes;
  const ir::Trace& trace;
  const analysis::CallGraph& cg;
  const cost::AreaModel& model;
  const PipelineConfig& cfg;
  double total = 0;  // entry, all software
};

bool Related(const Context& c, const Item& a, const Item& b) {
  for (const auto& x : a.roots) {
    for (const auto& y : b.roots) {
      if (x == y || c.cg.TransitiveCallees(x).count(y) || c.cg.TransitiveCallees(y).count(x)) {
        return true;
      }
    }
  }
  return false;
}

ir::Module WithChain(const ir::Module& base, const std::vector<const Item*>& items) {
  ir::Module m = base;
  for (const Item* it : items) {
    for (const auto& f : it->chain) {
      if (!m.Contains(f.name)) m.AddFunction(f);
    }
  }
  return m;
}

// Redirects every call to one of the item's roots to the item itself.
ir::Module Redirect(ir::Module m, const Item& item) {
  for (auto& f : m.mutable_functions()) {
    if (f.name == item.name) continue;
    for (auto& b : f.blocks) {
      for (auto& inst : b.instrs) {
        if (inst.op != ir::Opcode::kCall) continue;
        auto it = item.adapters.find(inst.callee);
        if (it == item.adapters.end()) continue;
        inst.operands = it->second.Apply(inst.operands);
        inst.callee = item.name;
      }
    }
  }
  return m;
}

enum class Stage { kRejected, kAligned, kVerified, kAreaWin, kProfitable };

// Merges a and b and pushes the result through the filters. Fills `out`
// when at least the merge succeeded.
Stage TryMerge(const Context& c, const Item& a, const Item& b, double similarity, uint64_t seed,
               Item* out, std::vector<VerificationRecord>* records) {
  ir::Module ctx = WithChain(c.base, {&a, &b});
  std::string name = merge::MergedName(a.name, b.name);
  if (ctx.Contains(name)) return Stage::kRejected;
  auto res = merge::MergePair(ctx, a.name, b.name, name, c.cfg.merge);
  if (!res.merged) {
    spdlog::debug("merge @{} @{} rejected: {}", a.name, b.name, res.diagnostic);
    return Stage::kRejected;
  }
  // Copies: adding the merged function may move the module's storage.
  const ir::Function fa = *ctx.Find(a.name);
  const ir::Function fb = *ctx.Find(b.name);
  const merge::MergedFunction& mf = *res.merged;
  ctx.AddFunction(mf.function);

  Item& k = *out;
  k.name = name;
  k.roots = a.roots;
  k.roots.insert(k.roots.end(), b.roots.begin(), b.roots.end());
  for (int side = 1; side <= 2; ++side) {
    const Item& src = side == 1 ? a : b;
    auto step = merge::CallAdapter::ForSide(fa, fb, mf.params, side);
    if (src.adapters.empty()) {
      k.adapters.emplace(src.name, step);
    } else {
      for (const auto& [root, ad] : src.adapters) k.adapters.emplace(root, ad.Then(step));
    }
  }
  k.chain = a.chain;
  k.chain.insert(k.chain.end(), b.chain.begin(), b.chain.end());
  k.chain.push_back(mf.function);

  VerificationRecord rec;
  rec.function = name;
  rec.parents = {a.name, b.name};
  merge::VerifyOptions vo;
  vo.trials = c.cfg.verify_trials;
  vo.seed = seed;
  auto rep = merge::VerifyMerge(ctx, a.name, b.name, name, vo);
  rec.compared = rep.compared;
  rec.inconclusive = rep.inconclusive;
  rec.passed = rep.passed;
  if (!rep.passed && rep.counterexample) {
    rec.failure = fmt::format("f_sel side {}: expected {}, got {}", rep.counterexample->side,
                              rep.counterexample->expected, rep.counterexample->actual);
  }

  // The program with the roots' call sites pointing at the merged function.
  ir::Module redirected = Redirect(ctx, k);
  ir::Trace trace;
  rec.end_to_end = rep.passed;
  if (rep.passed) {
    try {
      ir::CheckModule(redirected);
      for (std::size_t i = 0; i < c.inputs.size() && rec.end_to_end; ++i) {
        auto r = ir::Interpret(redirected, redirected.entry(), c.inputs[i]);
        ir::Outcome o{std::nullopt, r.value, std::move(r.heap)};
        if (!(o == c.outcomes[i])) {
          rec.end_to_end = false;
          rec.failure = fmt::format("program outcome differs on input {}", i);
        }
        trace.Accumulate(r.trace);
      }
    } catch (const std::exception& e) {
      rec.end_to_end = false;
      rec.failure = e.what();
    }
  }
  records->push_back(rec);
  if (!rec.passed || !rec.end_to_end) return Stage::kAligned;

  const auto& sw = c.cfg.software;
  const auto& hw = c.cfg.hardware;
  double clock = c.cfg.interconnect.clock_seconds;
  auto rcg = analysis::BuildCallGraph(redirected);
  k.area = c.model.Predict(cost::HierarchicalFeatures(redirected, name, rcg));
  k.sw = a.sw + b.sw;
  k.hw = cost::Latency(trace, name, hw, clock);
  k.cost.sw_seconds = cost::SelfLatency(trace, name, sw, clock);
  k.cost.hw_seconds = cost::SelfLatency(trace, name, hw, clock);
  k.cost.area_luts = c.model.Predict(cost::OwnFeatures(mf.function));
  k.ep = cost::EstimateProfitability(a.sw, b.sw, a.hw, b.hw, k.hw, c.total);

  Candidate& info = k.info;
  info.name = name;
  info.parents = {a.name, b.name};
  info.roots = k.roots;
  info.depth = static_cast<int>(k.roots.size()) > 2 ? 2 : 1;
  info.similarity = similarity;
  info.area = k.area;
  info.parents_area = a.area + b.area;
  info.hw_seconds = k.hw;
  info.ep = k.ep;
  if (!(k.area < a.area + b.area)) return Stage::kVerified;
  if (!(k.ep > 0)) return Stage::kAreaWin;
  return Stage::kProfitable;
}

// Ranks, merges and filters one level; returns the profitable results by
// descending EP.
std::vector<Item> MergeLevel(const Context& c, const std::vector<Item>& items, const ir::Module& ctx,
                             uint64_t seed, Funnel* funnel,
                             std::vector<VerificationRecord>* records) {
  std::vector<std::string> names;
  std::vector<analysis::Fingerprint> prints;
  std::map<std::string, const Item*> by_name;
  for (const auto& it : items) {
    names.push_back(it.name);
    prints.push_back(analysis::ComputeFingerprint(*ctx.Find(it.name)));
    by_name[it.name] = &it;
  }
  std::vector<analysis::RankedPair> pairs;
  for (const auto& rp : analysis::RankPairs(names, prints, c.cfg.similarity_cutoff)) {
    if (rp.similarity < c.cfg.similarity_cutoff) break;
    if (Related(c, *by_name[rp.first], *by_name[rp.second])) continue;
    pairs.push_back(rp);
    if (static_cast<int>(pairs.size()) >= c.cfg.max_pairs) break;
  }
  std::vector<Item> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ++funnel->ranked;
    Item k;
    Stage s = TryMerge(c, *by_name[pairs[i].first], *by_name[pairs[i].second],
                       pairs[i].similarity, seed + i, &k, records);
    if (s >= Stage::kAligned) ++funnel->aligned;
    if (s >= Stage::kVerified) ++funnel->verified;
    if (s >= Stage::kAreaWin) ++funnel->area_win;
    if (s >= Stage::kProfitable) {
      ++funnel->ep_positive;
      kept.push_back(std::move(k));
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Item& x, const Item& y) {
    if (x.ep != y.ep) return x.ep > y.ep;
    return x.name < y.name;
  });
  return kept;
}

}  // namespace

std::string_view ConfigurationName(Configuration c) {
  switch (c) {
    case Configuration::kFE:
      return "FE";
    case Configuration::kFLE:
      return "FLE";
    case Configuration::kFEMerging:
      return "FE+Merging";
    case Configuration::kFLEMerging:
      return "FLE+Merging";
  }
  return "?";
}

std::optional<Configuration> ParseConfiguration(std::string_view s) {
  for (Configuration c : kAllConfigurations) {
    if (ConfigurationName(c) == s) return c;
  }
  if (s == "Merging+FE") return Configuration::kFEMerging;
  if (s == "Merging+FLE") return Configuration::kFLEMerging;
  return std::nullopt;
}

bool ExtractsLoops(Configuration c) {
  return c == Configuration::kFLE || c == Configuration::kFLEMerging;
}

bool Merges(Configuration c) {
  return c == Configuration::kFEMerging || c == Configuration::kFLEMerging;
}

void PipelineConfig::Validate() const {
  auto check = [](bool ok, std::string_view field) {
    if (!ok) throw std::invalid_argument(fmt::format("{} must be non-negative", field));
  };
  check(area_budget >= 0, "area_budget");
  check(interconnect.latency_cycles >= 0, "latency");
  check(interconnect.bandwidth_bps >= 0, "bandwidth");
  check(interconnect.clock_seconds >= 0, "clock");
  if (!(interconnect.bandwidth_bps > 0)) {
    throw std::invalid_argument("bandwidth must be positive");
  }
  if (!(similarity_cutoff >= 0 && similarity_cutoff <= 1)) {
    throw std::invalid_argument("similarity_cutoff must lie in [0, 1]");
  }
  if (merge_depth < 1 || merge_depth > 2) throw std::invalid_argument("merge_depth must be 1 or 2");
  if (max_candidates < 0) throw std::invalid_argument("max_candidates must be non-negative");
  if (max_pairs < 0) throw std::invalid_argument("max_pairs must be non-negative");
  if (verify_trials < 1) throw std::invalid_argument("verify_trials must be positive");
  if (configurations.empty()) throw std::invalid_argument("configurations must not be empty");
}

const cost::AreaModel& DefaultAreaModel(uint64_t seed) {
  static std::mutex mu;
  static std::map<uint64_t, std::unique_ptr<cost::AreaModel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[seed];
  if (!slot) {
    spdlog::info("training the default area model (seed {})", seed);
    cost::MlpOptions opts;
    opts.seed = seed;
    slot = std::make_unique<cost::AreaModel>(cost::TrainMlp(cost::GenerateDataset(600, seed), opts));
  }
  return *slot;
}

ir::Trace Profile(const ir::Module& m, const std::vector<ir::Invocation>& inputs) {
  ir::Trace t;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      t.Accumulate(ir::Interpret(m, m.entry(), inputs[i]).trace);
    } catch (const ir::Trap& e) {
      throw DseError(fmt::format("input {} traps: {}", i, e.what()));
    }
  }
  return t;
}

PreparedConfiguration Prepare(const ir::Module& m, const std::vector<ir::Invocation>& inputs,
                              Configuration config, const cost::AreaModel& model,
                              const PipelineConfig& cfg) {
  cfg.Validate();
  if (inputs.empty()) throw DseError("no inputs to profile");
  if (m.entry().empty()) throw DseError("module has no entry function");
  PreparedConfiguration prep;
  prep.config = config;
  if (ExtractsLoops(config)) {
    auto ex = analysis::ExtractLoops(m);
    for (const auto& w : ex.warnings) spdlog::debug("loop extraction: {}", w);
    prep.module = std::move(ex.module);
  } else {
    prep.module = m;
  }
  const ir::Module& base = prep.module;
  ir::CheckModule(base);
  prep.trace = Profile(base, inputs);
  auto cg = analysis::BuildCallGraph(base);
  double clock = cfg.interconnect.clock_seconds;

  std::vector<Item> originals;
  for (const auto& f : base.functions()) {
    partition::FunctionCost fc;
    fc.sw_seconds = cost::SelfLatency(prep.trace, f.name, cfg.software, clock);
    fc.hw_seconds = cost::SelfLatency(prep.trace, f.name, cfg.hardware, clock);
    fc.area_luts = model.Predict(cost::OwnFeatures(f));
    prep.costs[f.name] = fc;
    auto inv = prep.trace.invocations.find(f.name);
    if (f.name == base.entry() || inv == prep.trace.invocations.end() || inv->second == 0) continue;
    Item it;
    it.name = f.name;
    it.roots = {f.name};
    it.sw = cost::Latency(prep.trace, f.name, cfg.software, clock);
    it.hw = cost::Latency(prep.trace, f.name, cfg.hardware, clock);
    it.area = model.Predict(cost::HierarchicalFeatures(base, f.name, cg));
    originals.push_back(std::move(it));
  }

  if (Merges(config)) {
    std::vector<ir::Outcome> outcomes;
    for (const auto& inv : inputs) outcomes.push_back(ir::RunForOutcome(base, base.entry(), inv));
    Context c{base, inputs, outcomes, prep.trace, cg, model, cfg,
              cost::Latency(prep.trace, base.entry(), cfg.software, clock)};
    auto level1 = MergeLevel(c, originals, base, cfg.seed, &prep.funnel, &prep.verification);
    if (static_cast<int>(level1.size()) > cfg.max_candidates) level1.resize(cfg.max_candidates);
    std::vector<Item> level2;
    if (cfg.merge_depth >= 2 && level1.size() >= 2) {
      std::vector<const Item*> ptrs;
      for (const auto& it : level1) ptrs.push_back(&it);
      ir::Module ctx = WithChain(base, ptrs);
      level2 = MergeLevel(c, level1, ctx, cfg.seed + 1'000'003, &prep.funnel, &prep.verification);
      std::size_t room = static_cast<std::size_t>(cfg.max_candidates) - level1.size();
      if (level2.size() > room) level2.resize(room);
    }
    for (auto* level : {&level1, &level2}) {
      for (const auto& it : *level) {
        for (const auto& f : it.chain) {
          if (!prep.module.Contains(f.name)) prep.module.AddFunction(f);
        }
        prep.costs[it.name] = it.cost;
        prep.candidates.push_back(it.info);
      }
    }
    prep.funnel.candidates = static_cast<int>(prep.candidates.size());
    ir::CheckModule(prep.module);
  }

  auto p = partition::BuildProblem(prep.module, prep.costs, prep.trace, cfg.interconnect, 0);
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (!p.nodes[i].merged) prep.baseline_ps += p.nodes[i].sw_ps;
  }
  return prep;
}

PointResult EvaluatePoint(const PreparedConfiguration& prep, double budget_luts,
                          const partition::Interconnect& ic, const partition::SolveOptions& solve) {
  auto p = partition::BuildProblem(prep.module, prep.costs, prep.trace, ic, budget_luts);
  auto s = partition::Solve(p, solve);
  PointResult r;
  r.config = prep.config;
  r.budget_luts = budget_luts;
  r.interconnect = ic;
  r.objective_ps = s.objective_ps;
  r.baseline_ps = prep.baseline_ps;
  r.software_ps = s.software_ps;
  r.hardware_ps = s.hardware_ps;
  r.communication_ps = s.communication_ps;
  r.area_used = s.area_used;
  r.optimal = s.optimal;
  r.software = s.Software(p);
  r.hardware_original = s.HardwareOriginal(p);
  r.hardware_merged = s.HardwareMerged(p);
  if (s.objective_ps > 0) {
    double obj = static_cast<double>(s.objective_ps);
    r.speedup = static_cast<double>(prep.baseline_ps) / obj;
    r.software_pct = 100.0 * static_cast<double>(s.software_ps) / obj;
    r.hardware_pct = 100.0 * static_cast<double>(s.hardware_ps) / obj;
    r.communication_pct = 100.0 * static_cast<double>(s.communication_ps) / obj;
  }
  return r;
}

ConfigurationSummary Summarize(const PreparedConfiguration& prep) {
  ConfigurationSummary s;
  s.config = prep.config;
  s.baseline_ps = prep.baseline_ps;
  s.functions = static_cast<int>(prep.module.functions().size());
  s.funnel = prep.funnel;
  s.candidates = prep.candidates;
  s.verification = prep.verification;
  return s;
}

SweepGrid SweepGrid::Presets() {
  SweepGrid g;
  for (int k = 0; k <= 6; ++k) g.budgets.push_back(std::pow(10.0, 3 + 0.5 * k));
  g.latencies = {25, 500};
  g.bandwidths = {1e9, 4e9, std::numeric_limits<double>::infinity()};
  return g;
}

DseReport Sweep(const ir::Module& m, const std::vector<ir::Invocation>& inputs,
                const SweepGrid& grid, const PipelineConfig& cfg, const cost::AreaModel& model,
                int jobs) {
  cfg.Validate();
  for (double b : grid.budgets) {
    if (!(b >= 0)) throw std::invalid_argument("budget must be non-negative");
  }
  for (double l : grid.latencies) {
    if (!(l >= 0)) throw std::invalid_argument("latency must be non-negative");
  }
  for (double w : grid.bandwidths) {
    if (!(w > 0)) throw std::invalid_argument("bandwidth must be positive");
  }
  const auto& configs = cfg.configurations;
  std::vector<PreparedConfiguration> preps(configs.size());
  ParallelFor(configs.size(), jobs,
              [&](std::size_t i) { preps[i] = Prepare(m, inputs, configs[i], model, cfg); });

  DseReport r;
  r.seed = cfg.seed;
  for (const auto& p : preps) r.configurations.push_back(Summarize(p));
  std::size_t per = grid.size();
  r.points.resize(configs.size() * per);
  ParallelFor(r.points.size(), jobs, [&](std::size_t i) {
    std::size_t ci = i / per, k = i % per;
    std::size_t nb = grid.bandwidths.size(), nl = grid.latencies.size();
    partition::Interconnect ic = cfg.interconnect;
    ic.bandwidth_bps = grid.bandwidths[k % nb];
    ic.latency_cycles = grid.latencies[(k / nb) % nl];
    r.points[i] = EvaluatePoint(preps[ci], grid.budgets[k / (nb * nl)], ic, cfg.solve);
  });
  return r;
}

DseReport RunPipeline(const ir::Module& m, const std::vector<ir::Invocation>& inputs,
                      const PipelineConfig& cfg, const cost::AreaModel& model) {
  SweepGrid g{{cfg.area_budget}, {cfg.interconnect.latency_cycles},
              {cfg.interconnect.bandwidth_bps}};
  return Sweep(m, inputs, g, cfg, model, 1);
}

std::string ReportCsv(const DseReport& r) {
  std::string out(kCsvHeader);
  out += "\n";
  for (const auto& p : r.points) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", ConfigurationName(p.config), p.budget_luts,
                       p.interconnect.latency_cycles, p.interconnect.bandwidth_bps,
                       partition::ToSeconds(p.objective_ps), p.speedup, p.area_used,
                       p.communication_pct, p.MergedSelected());
  }
  return out;
}

namespace {

ordered_json FiniteOrNull(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

ordered_json FunnelJson(const Funnel& f) {
  return {{"ranked", f.ranked},         {"aligned", f.aligned},
          {"verified", f.verified},     {"area_win", f.area_win},
          {"ep_positive", f.ep_positive}, {"candidates", f.candidates}};
}

}  // namespace

std::string ReportJson(const DseReport& r) {
  ordered_json j;
  j["schema"] = kJsonSchema;
  j["program"] = r.program;
  j["seed"] = r.seed;
  ordered_json configs = ordered_json::array();
  for (const auto& c : r.configurations) {
    ordered_json cj;
    cj["config"] = ConfigurationName(c.config);
    cj["baseline_s"] = partition::ToSeconds(c.baseline_ps);
    cj["functions"] = c.functions;
    cj["funnel"] = FunnelJson(c.funnel);
    ordered_json cands = ordered_json::array();
    for (const auto& k : c.candidates) {
      cands.push_back({{"name", k.name},
                       {"parents", k.parents},
                       {"roots", k.roots},
                       {"depth", k.depth},
                       {"similarity", k.similarity},
                       {"area_luts", k.area},
                       {"parents_area_luts", k.parents_area},
                       {"hw_s", k.hw_seconds},
                       {"ep", k.ep}});
    }
    cj["candidates"] = std::move(cands);
    ordered_json ver = ordered_json::array();
    for (const auto& v : c.verification) {
      ver.push_back({{"function", v.function},
                     {"parents", v.parents},
                     {"compared", v.compared},
                     {"inconclusive", v.inconclusive},
                     {"passed", v.passed},
                     {"end_to_end", v.end_to_end},
                     {"failure", v.failure}});
    }
    cj["verification"] = std::move(ver);
    configs.push_back(std::move(cj));
  }
  j["configurations"] = std::move(configs);
  ordered_json points = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json pj;
    pj["config"] = ConfigurationName(p.config);
    pj["budget_luts"] = p.budget_luts;
    pj["latency_cycles"] = p.interconnect.latency_cycles;
    pj["bandwidth_bps"] = FiniteOrNull(p.interconnect.bandwidth_bps);
    pj["clock_s"] = p.interconnect.clock_seconds;
    pj["objective_s"] = partition::ToSeconds(p.objective_ps);
    pj["baseline_s"] = partition::ToSeconds(p.baseline_ps);
    pj["speedup"] = p.speedup;
    pj["area_used"] = p.area_used;
    pj["breakdown"] = {{"software_pct", p.software_pct},
                       {"hardware_pct", p.hardware_pct},
                       {"communication_pct", p.communication_pct}};
    pj["time_ps"] = {{"software", p.software_ps},
                     {"hardware", p.hardware_ps},
                     {"communication", p.communication_ps},
                     {"objective", p.objective_ps}};
    pj["software"] = p.software;
    pj["hardware_original"] = p.hardware_original;
    pj["hardware_merged"] = p.hardware_merged;
    pj["n_merged_selected"] = p.MergedSelected();
    pj["optimal"] = p.optimal;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

std::vector<std::string> ValidateReportJson(std::string_view text) {
  std::vector<std::string> errs;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    return {fmt::format("not JSON: {}", e.what())};
  }
  auto need = [&](const ordered_json& o, const std::string& where, const char* key,
                  bool (ordered_json::*is)() const noexcept) {
    if (!o.is_object() || !o.contains(key)) {
      errs.push_back(fmt::format("{}: missing '{}'", where, key));
      return false;
    }
    if (!(o[key].*is)()) {
      errs.push_back(fmt::format("{}: '{}' has the wrong type", where, key));
      return false;
    }
    return true;
  };
  using J = ordered_json;
  if (!j.is_object()) return {"document is not an object"};
  if (need(j, "$", "schema", &J::is_string) && j["schema"] != kJsonSchema) {
    errs.push_back(fmt::format("$: unknown schema '{}'", j["schema"].get<std::string>()));
  }
  need(j, "$", "program", &J::is_string);
  need(j, "$", "seed", &J::is_number_unsigned);
  std::map<std::string, std::set<std::string>> passing;  // config -> verified functions
  if (need(j, "$", "configurations", &J::is_array)) {
    for (std::size_t i = 0; i < j["configurations"].size(); ++i) {
      const auto& c = j["configurations"][i];
      std::string w = fmt::format("configurations[{}]", i);
      if (!need(c, w, "config", &J::is_string)) continue;
      std::string name = c["config"];
      if (!ParseConfiguration(name)) errs.push_back(w + ": unknown config " + name);
      need(c, w, "baseline_s", &J::is_number);
      need(c, w, "functions", &J::is_number_integer);
      if (need(c, w, "funnel", &J::is_object)) {
        const auto& f = c["funnel"];
        int64_t prev = std::numeric_limits<int64_t>::max();
        for (const char* k :
             {"ranked", "aligned", "verified", "area_win", "ep_positive", "candidates"}) {
          if (!need(f, w + ".funnel", k, &J::is_number_integer)) continue;
          int64_t v = f[k];
          if (v < 0 || v > prev) errs.push_back(fmt::format("{}.funnel: '{}' breaks monotonicity", w, k));
          prev = v;
        }
      }
      if (need(c, w, "candidates", &J::is_array)) {
        for (const auto& k : c["candidates"]) {
          need(k, w + ".candidates[]", "name", &J::is_string);
          need(k, w + ".candidates[]", "parents", &J::is_array);
          need(k, w + ".candidates[]", "ep", &J::is_number);
        }
      }
      auto& pass = passing[name];
      if (need(c, w, "verification", &J::is_array)) {
        for (const auto& v : c["verification"]) {
          if (!need(v, w + ".verification[]", "function", &J::is_string)) continue;
          bool ok = need(v, w + ".verification[]", "passed", &J::is_boolean) &&
                    need(v, w + ".verification[]", "end_to_end", &J::is_boolean) &&
                    v["passed"].get<bool>() && v["end_to_end"].get<bool>();
          need(v, w + ".verification[]", "compared", &J::is_number_integer);
          if (ok) pass.insert(v["function"].get<std::string>());
        }
      }
    }
  }
  if (need(j, "$", "points", &J::is_array)) {
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
      const auto& p = j["points"][i];
      std::string w = fmt::format("points[{}]", i);
      bool named = need(p, w, "config", &J::is_string);
      for (const char* k : {"budget_luts", "latency_cycles", "clock_s", "objective_s",
                            "baseline_s", "speedup"}) {
        if (need(p, w, k, &J::is_number) && p[k].get<double>() < 0) {
          errs.push_back(fmt::format("{}: '{}' is negative", w, k));
        }
      }
      if (!p.contains("bandwidth_bps") ||
          !(p["bandwidth_bps"].is_null() || p["bandwidth_bps"].is_number())) {
        errs.push_back(w + ": 'bandwidth_bps' must be a number or null");
      }
      need(p, w, "area_used", &J::is_number_integer);
      need(p, w, "optimal", &J::is_boolean);
      need(p, w, "n_merged_selected", &J::is_number_integer);
      if (need(p, w, "breakdown", &J::is_object)) {
        double sum = 0;
        for (const char* k : {"software_pct", "hardware_pct", "communication_pct"}) {
          if (need(p["breakdown"], w + ".breakdown", k, &J::is_number)) sum += p["breakdown"][k].get<double>();
        }
        if (std::abs(sum - 100.0) > 0.1) {
          errs.push_back(fmt::format("{}: breakdown sums to {}", w, sum));
        }
      }
      if (need(p, w, "time_ps", &J::is_object)) {
        const auto& t = p["time_ps"];
        bool ok = true;
        for (const char* k : {"software", "hardware", "communication", "objective"}) {
          ok &= need(t, w + ".time_ps", k, &J::is_number_integer);
        }
        if (ok && t["software"].get<int64_t>() + t["hardware"].get<int64_t>() +
                          t["communication"].get<int64_t>() !=
                      t["objective"].get<int64_t>()) {
          errs.push_back(w + ": time_ps terms do not add up to the objective");
        }
      }
      for (const char* k : {"software", "hardware_original"}) need(p, w, k, &J::is_array);
      if (need(p, w, "hardware_merged", &J::is_array) && named) {
        const auto& pass = passing[p["config"].get<std::string>()];
        for (const auto& f : p["hardware_merged"]) {
          if (!f.is_string() || !pass.count(f.get<std::string>())) {
            errs.push_back(fmt::format("{}: merged {} in hardware without a passing verification",
                                       w, f.dump()));
          }
        }
        if (p.contains("n_merged_selected") && p["n_merged_selected"].is_number_integer() &&
            p["n_merged_selected"].get<std::size_t>() != p["hardware_merged"].size()) {
          errs.push_back(w + ": n_merged_selected disagrees with hardware_merged");
        }
      }
    }
  }
  return errs;
}

}  // namespace mergedse::dse
