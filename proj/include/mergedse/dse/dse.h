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

// The end-to-end exploration: optional loop extraction, merging candidates
// filtered by verification, area and profitability, then partitioning over
// a grid of area budgets and interconnect parameters.

#ifndef MERGEDSE_DSE_DSE_H_
#define MERGEDSE_DSE_DSE_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mergedse/cost/latency.h"
#include "mergedse/cost/model.h"
#include "mergedse/ir/heap.h"
#include "mergedse/ir/interpreter.h"
#include "mergedse/ir/module.h"
#include "mergedse/merge/merger.h"
#include "mergedse/partition/partition.h"

namespace mergedse::dse {

class DseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Configuration : uint8_t { kFE, kFLE, kFEMerging, kFLEMerging };

inline constexpr std::array<Configuration, 4> kAllConfigurations = {
    Configuration::kFE, Configuration::kFLE, Configuration::kFEMerging,
    Configuration::kFLEMerging};

std::string_view ConfigurationName(Configuration c);  // "FE", ..., "FLE+Merging"
std::optional<Configuration> ParseConfiguration(std::string_view s);
bool ExtractsLoops(Configuration c);
bool Merges(Configuration c);

struct PipelineConfig {
  std::vector<Configuration> configurations{kAllConfigurations.begin(),
                                            kAllConfigurations.end()};
  double area_budget = 1e4;  // LUTs
  // Latency cycles, bandwidth and the clock period; the clock also scales
  // the opcode latency tables.
  partition::Interconnect interconnect{};
  double similarity_cutoff = 0.5;
  int merge_depth = 2;           // 1: pairs of originals only
  int max_pairs = 256;           // ranked pairs tried per depth
  int max_candidates = 32;       // merged functions handed to the partitioner
  uint64_t seed = 7;
  int verify_trials = 200;       // per f_sel side
  cost::LatencyTable software = cost::LatencyTable::DefaultSoftware();
  cost::LatencyTable hardware = cost::LatencyTable::DefaultHardware();
  merge::MergeOptions merge{};
  partition::SolveOptions solve{};

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

// ranked >= aligned >= verified >= area_win >= ep_positive >= candidates.
// The per-point "selected" count lives in PointResult.
struct Funnel {
  int ranked = 0;
  int aligned = 0;
  int verified = 0;
  int area_win = 0;
  int ep_positive = 0;
  int candidates = 0;
};

struct VerificationRecord {
  std::string function;
  std::vector<std::string> parents;
  int compared = 0;
  int inconclusive = 0;
  bool passed = false;      // differential check of the merged body
  bool end_to_end = false;  // program outcome unchanged with calls redirected
  std::string failure;
};

struct Candidate {
  std::string name;
  std::vector<std::string> parents;
  std::vector<std::string> roots;  // original functions it stands for
  int depth = 1;
  double similarity = 0;
  double area = 0;          // hierarchical, LUTs
  double parents_area = 0;  // sum of the parents' hierarchical areas
  double hw_seconds = 0;    // inclusive, calls redirected to it
  double ep = 0;
};

// Everything about one configuration that does not depend on the budget or
// the interconnect.
struct PreparedConfiguration {
  Configuration config = Configuration::kFE;
  ir::Module module;  // after extraction, with the kept candidates appended
  ir::Trace trace;    // all-software profile over every input
  std::map<std::string, partition::FunctionCost> costs;  // own bodies
  std::vector<Candidate> candidates;
  std::vector<VerificationRecord> verification;
  Funnel funnel;
  int64_t baseline_ps = 0;  // all-software objective
};

struct PointResult {
  Configuration config = Configuration::kFE;
  double budget_luts = 0;
  partition::Interconnect interconnect{};
  int64_t objective_ps = 0;
  int64_t baseline_ps = 0;
  int64_t software_ps = 0;
  int64_t hardware_ps = 0;
  int64_t communication_ps = 0;
  int64_t area_used = 0;
  double speedup = 1;
  double software_pct = 100, hardware_pct = 0, communication_pct = 0;
  std::vector<std::string> software, hardware_original, hardware_merged;
  bool optimal = true;

  int MergedSelected() const { return static_cast<int>(hardware_merged.size()); }
};

struct ConfigurationSummary {
  Configuration config = Configuration::kFE;
  int64_t baseline_ps = 0;
  int functions = 0;
  Funnel funnel;
  std::vector<Candidate> candidates;
  std::vector<VerificationRecord> verification;
};

struct DseReport {
  std::string program;
  uint64_t seed = 0;
  std::vector<ConfigurationSummary> configurations;
  std::vector<PointResult> points;  // configuration-major, then budget,
                                    // latency, bandwidth
};

// Trains the default MLP on the generated dataset for `seed`. Cached per
// process; thread-safe.
const cost::AreaModel& DefaultAreaModel(uint64_t seed);

// Runs every input from m's entry and sums the traces. Throws DseError if
// an input traps.
ir::Trace Profile(const ir::Module& m, const std::vector<ir::Invocation>& inputs);

PreparedConfiguration Prepare(const ir::Module& m, const std::vector<ir::Invocation>& inputs,
                              Configuration config, const cost::AreaModel& model,
                              const PipelineConfig& cfg);

PointResult EvaluatePoint(const PreparedConfiguration& prep, double budget_luts,
                          const partition::Interconnect& ic,
                          const partition::SolveOptions& solve = {});

ConfigurationSummary Summarize(const PreparedConfiguration& prep);

// One point per configuration at cfg's budget and interconnect.
DseReport RunPipeline(const ir::Module& m, const std::vector<ir::Invocation>& inputs,
                      const PipelineConfig& cfg, const cost::AreaModel& model);

struct SweepGrid {
  std::vector<double> budgets;
  std::vector<double> latencies;   // cycles
  std::vector<double> bandwidths;  // bytes/s, inf allowed

  // Budgets 10^3 .. 10^6 in half decades, latencies {25, 500},
  // bandwidths {1e9, 4e9, inf}.
  static SweepGrid Presets();
  std::size_t size() const { return budgets.size() * latencies.size() * bandwidths.size(); }
};

// Every grid point for every configuration in cfg. Points are solved on
// `jobs` worker threads; the result does not depend on `jobs`.
DseReport Sweep(const ir::Module& m, const std::vector<ir::Invocation>& inputs,
                const SweepGrid& grid, const PipelineConfig& cfg,
                const cost::AreaModel& model, int jobs = 1);

inline constexpr std::string_view kCsvHeader =
    "config,budget_luts,latency_cycles,bandwidth_bps,objective_s,speedup,area_used,comm_pct,"
    "n_merged_selected";
inline constexpr std::string_view kJsonSchema = "dse-report/v1";

std::string ReportCsv(const DseReport& r);
std::string ReportJson(const DseReport& r);

// Problems found in a dse-report/v1 document; empty when it conforms.
std::vector<std::string> ValidateReportJson(std::string_view text);

}  // namespace mergedse::dse

#endif  // MERGEDSE_DSE_DSE_H_
