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

#include "mergedse/cli/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "fmt/core.h"
#include "mergedse/analysis/call_graph.h"
#include "mergedse/analysis/fingerprint.h"
#include "mergedse/analysis/loop_extraction.h"
#include "mergedse/analysis/loops.h"
#include "mergedse/cost/features.h"
#include "mergedse/cost/latency.h"
#include "mergedse/cost/model.h"
#include "mergedse/cost/oracle.h"
#include "mergedse/dse/dse.h"
#include "mergedse/ir/diagnostics.h"
#include "mergedse/ir/heap.h"
#include "mergedse/ir/interpreter.h"
#include "mergedse/ir/text.h"
#include "mergedse/merge/merger.h"
#include "mergedse/merge/verify.h"
#include "mergedse/partition/partition.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace mergedse::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unreadable files, malformed inputs and the like: exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double ParseNonNegative(const std::string& field, std::string_view raw, bool allow_inf = false) {
  std::string_view v = Trim(raw);
  if (allow_inf && (v == "inf" || v == "infinity")) return kInf;
  double d = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size() || !std::isfinite(d)) {
    throw ConfigError(field, fmt::format("invalid value for {}: '{}'", field, raw));
  }
  if (d < 0) throw ConfigError(field, fmt::format("{} must be non-negative, got {}", field, raw));
  return d;
}

int64_t ParseInteger(const std::string& field, std::string_view raw, int64_t lo, int64_t hi) {
  std::string_view v = Trim(raw);
  int64_t n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(field, fmt::format("invalid value for {}: '{}'", field, raw));
  }
  if (n < lo || n > hi) {
    throw ConfigError(field, fmt::format("{} must lie in [{}, {}], got {}", field, lo, hi, raw));
  }
  return n;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) throw InputError(fmt::format("cannot write '{}'", path));
}

// Writes to `path`, or to `out` when the path is empty.
void Emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    WriteFile(path, content);
  }
}

ir::Module LoadModule(const std::string& path) {
  try {
    return ir::ParseModule(ReadFile(path));
  } catch (const ir::IrError& e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

std::vector<ir::Invocation> LoadInputs(const std::string& path) {
  try {
    return ir::ParseHeapFile(ReadFile(path));
  } catch (const ir::IrError& e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

// The inputs next to a program: prog.ir -> prog.heap.
std::string SiblingHeap(const std::string& ir_path) {
  return fs::path(ir_path).replace_extension(".heap").string();
}

void SetupLogging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("mergedse");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  });
  const char* env = std::getenv("MERGEDSE_LOG");
  std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw UsageError(fmt::format("MERGEDSE_LOG must be error, info or debug, got '{}'", level));
  }
}

// Command-line values, kept as text until merged over the config file.
struct Flags {
  std::string config, budget, latency, bandwidth, clock, mode, model, seed, jobs, output;
};

void AddConfigFlag(CLI::App* s, Flags* f) {
  s->add_option("--config", f->config, "key = value configuration file");
}
void AddClockFlag(CLI::App* s, Flags* f) {
  s->add_option("--clock", f->clock, "clock period in seconds per cycle (default 1e-9)");
}
void AddModelFlag(CLI::App* s, Flags* f) {
  s->add_option("--model", f->model,
                "area model file from 'train' (default: train the MLP for --seed)");
}
void AddSeedFlag(CLI::App* s, Flags* f) {
  s->add_option("--seed", f->seed, "seed for every random choice (default 7)");
}
void AddOutputFlag(CLI::App* s, Flags* f, const std::string& what) {
  s->add_option("-o,--output", f->output, what);
}
void AddPointFlags(CLI::App* s, Flags* f) {
  AddConfigFlag(s, f);
  s->add_option("--budget", f->budget, "area budget in LUTs");
  s->add_option("--latency", f->latency, "interconnect latency in cycles per call");
  s->add_option("--bandwidth", f->bandwidth, "interconnect bandwidth in bytes/s, or inf");
  AddClockFlag(s, f);
  s->add_option("--mode", f->mode, "FE, FLE, FE+Merging, FLE+Merging or sweep (default: all)");
  AddModelFlag(s, f);
  AddSeedFlag(s, f);
}

ToolConfig Resolve(const Flags& f) {
  ToolConfig cfg;
  if (!f.config.empty()) cfg = ParseConfig(ReadFile(f.config));
  const std::pair<const char*, const std::string*> overrides[] = {
      {"budget", &f.budget}, {"latency", &f.latency}, {"bandwidth", &f.bandwidth},
      {"clock", &f.clock},   {"mode", &f.mode},       {"model", &f.model},
      {"seed", &f.seed},     {"jobs", &f.jobs}};
  for (const auto& [key, value] : overrides) {
    if (!value->empty()) cfg.Set(key, *value);
  }
  return cfg;
}

dse::PipelineConfig ToPipeline(const ToolConfig& t) {
  dse::PipelineConfig p;
  if (!t.mode.empty() && t.mode != "sweep") p.configurations = {*dse::ParseConfiguration(t.mode)};
  p.area_budget = t.area_budget.value_or(0);
  p.interconnect.latency_cycles = t.latency_cycles.value_or(p.interconnect.latency_cycles);
  p.interconnect.bandwidth_bps = t.bandwidth_bps.value_or(p.interconnect.bandwidth_bps);
  p.interconnect.clock_seconds = t.clock_seconds;
  p.similarity_cutoff = t.similarity_cutoff;
  p.merge_depth = t.merge_depth;
  p.max_candidates = t.max_candidates;
  p.seed = t.seed;
  p.verify_trials = t.verify_trials;
  p.software.Override(t.sw_latency);
  p.hardware.Override(t.hw_latency);
  return p;
}

const cost::AreaModel& ResolveModel(const ToolConfig& t, cost::AreaModel* storage) {
  if (t.model_path.empty()) return dse::DefaultAreaModel(t.seed);
  try {
    *storage = cost::AreaModel::Parse(ReadFile(t.model_path));
  } catch (const cost::ModelError& e) {
    throw InputError(fmt::format("{}: {}", t.model_path, e.what()));
  }
  return *storage;
}

// Pairs each .ir with the .heap that follows it, or with its sibling.
std::vector<std::pair<std::string, std::string>> ProgramArgs(const std::vector<std::string>& files) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : files) {
    if (fs::path(f).extension() == ".heap") {
      if (out.empty() || !out.back().second.empty()) {
        throw UsageError(fmt::format("'{}' does not follow a program", f));
      }
      out.back().second = f;
    } else {
      out.emplace_back(f, "");
    }
  }
  for (auto& [ir, heap] : out) {
    if (heap.empty()) heap = SiblingHeap(ir);
  }
  if (out.empty()) throw UsageError("no program given");
  return out;
}

// ----------------------------------------------------------------------------

int Analyze(const std::vector<std::string>& files, const Flags& fl, std::ostream& out) {
  ToolConfig t = Resolve(fl);
  ir::Module m = LoadModule(files.at(0));
  std::optional<ir::Trace> trace;
  if (files.size() > 1) trace = dse::Profile(m, LoadInputs(files[1]));
  auto cg = analysis::BuildCallGraph(m);
  auto sw = cost::LatencyTable::DefaultSoftware(), hw = cost::LatencyTable::DefaultHardware();
  sw.Override(t.sw_latency);
  hw.Override(t.hw_latency);
  std::string s = fmt::format("# {}: {} functions, entry @{}\n", files[0], m.functions().size(),
                              m.entry());
  s += "function\tinstrs\tblocks\tloops\tcallees\tcalls\tsw_s\thw_s\n";
  for (const auto& f : m.functions()) {
    std::string callees;
    for (const auto& c : cg.Callees(f.name)) callees += (callees.empty() ? "@" : ",@") + c;
    std::string dyn = "-\t-\t-";
    if (trace) {
      auto it = trace->invocations.find(f.name);
      dyn = fmt::format("{}\t{}\t{}", it == trace->invocations.end() ? 0 : it->second,
                        cost::Latency(*trace, f.name, sw, t.clock_seconds),
                        cost::Latency(*trace, f.name, hw, t.clock_seconds));
    }
    s += fmt::format("@{}\t{}\t{}\t{}\t{}\t{}\n", f.name, f.InstructionCount(), f.blocks.size(),
                     analysis::NaturalLoops(f).loops.size(), callees.empty() ? "-" : callees, dyn);
  }
  s += fmt::format("# pairs with similarity >= {}\nfirst\tsecond\tshared\tsimilarity\n",
                   t.similarity_cutoff);
  for (const auto& p : analysis::RankPairs(m)) {
    if (p.similarity < t.similarity_cutoff) break;
    s += fmt::format("@{}\t@{}\t{}\t{:.4f}\n", p.first, p.second, p.shared, p.similarity);
  }
  Emit(fl.output, s, out);
  return kExitOk;
}

int Transform(const std::string& file, const Flags& fl, std::ostream& out) {
  auto ex = analysis::ExtractLoops(LoadModule(file));
  for (const auto& w : ex.warnings) spdlog::warn("{}", w);
  spdlog::info("extracted {} loops", ex.extracted.size());
  Emit(fl.output, ir::PrintModule(ex.module), out);
  return kExitOk;
}

int Merge(const std::string& file, const std::string& f1, const std::string& f2,
          std::string name, const Flags& fl, std::ostream& out, std::ostream& err) {
  ir::Module m = LoadModule(file);
  if (name.empty()) name = merge::MergedName(f1, f2);
  for (const auto& f : {f1, f2}) {
    if (!m.Contains(f)) throw InputError(fmt::format("no function @{} in {}", f, file));
  }
  if (m.Contains(name)) throw InputError(fmt::format("@{} already exists", name));
  auto res = merge::MergePair(m, f1, f2, name);
  if (!res.merged) {
    err << fmt::format("error: cannot merge @{} and @{}: {}\n", f1, f2, res.diagnostic);
    return kExitInput;
  }
  const auto& mf = *res.merged;
  m.AddFunction(mf.function);
  err << fmt::format(
      "@{}: {} aligned instruction pairs of {} + {}, {} selects, {} glue, {} initializers\n",
      name, mf.alignment.AlignedCount(), mf.alignment.len1, mf.alignment.len2,
      mf.overhead.selects, mf.overhead.glue, mf.overhead.init_consts);
  Emit(fl.output, ir::PrintModule(m), out);
  return kExitOk;
}

int Verify(const std::string& file, const std::string& f1, const std::string& f2, int trials,
           const Flags& fl, std::ostream& out) {
  ToolConfig t = Resolve(fl);
  ir::Module m = LoadModule(file);
  std::string p1, p2, merged;
  if (f2.empty()) {
    const ir::Function* f = m.Find(f1);
    if (!f) throw InputError(fmt::format("no function @{} in {}", f1, file));
    if (f->provenance != ir::Provenance::kMerged || f->parents.size() != 2) {
      throw InputError(fmt::format("@{} is not a merged function; name two functions instead", f1));
    }
    p1 = f->parents[0];
    p2 = f->parents[1];
    merged = f1;
  } else {
    auto res = merge::MergePair(m, f1, f2, merge::MergedName(f1, f2));
    if (!res.merged) {
      throw InputError(fmt::format("cannot merge @{} and @{}: {}", f1, f2, res.diagnostic));
    }
    p1 = f1;
    p2 = f2;
    merged = res.merged->function.name;
    m.AddFunction(res.merged->function);
  }
  merge::VerifyOptions vo;
  vo.trials = trials;
  vo.seed = t.seed;
  auto rep = merge::VerifyMerge(m, p1, p2, merged, vo);
  std::string s = fmt::format("{} @{} (@{}, @{}): {} compared, {} inconclusive\n",
                              rep.passed ? "PASS" : "FAIL", merged, p1, p2, rep.compared,
                              rep.inconclusive);
  if (rep.counterexample) {
    const auto& c = *rep.counterexample;
    s += fmt::format("  f_sel side {}: expected {}, got {}\n", c.side, c.expected, c.actual);
    s += "  input:\n" + ir::PrintHeapFile({c.parent_input});
  }
  Emit(fl.output, s, out);
  return rep.passed ? kExitOk : kExitInput;
}

const std::vector<double> kLassoGrid{1e-4, 1e-3, 1e-2, 3e-2, 0.1, 0.3};

std::vector<cost::Sample> Dataset(const std::string& csv, int samples, uint64_t seed) {
  if (csv.empty()) return cost::GenerateDataset(samples, seed);
  try {
    return cost::DatasetFromCsv(ReadFile(csv));
  } catch (const std::runtime_error& e) {
    throw InputError(fmt::format("{}: {}", csv, e.what()));
  }
}

std::string FormatReport(const cost::EvalReport& r) {
  return fmt::format("r2_train {:.4f}\nr2_test {:.4f}\nmre_train {:.4f}\nmre_test {:.4f}\n",
                     r.r2_train, r.r2_test, r.mre_train, r.mre_test);
}

int Train(const std::string& kind, int samples, const std::string& csv, const Flags& fl,
          std::ostream& out, std::ostream& err) {
  ToolConfig t = Resolve(fl);
  auto data = Dataset(csv, samples, t.seed);
  std::vector<cost::Sample> train, test;
  cost::SplitDataset(data, 0.8, t.seed, &train, &test);
  cost::AreaModel model;
  if (kind == "mlp") {
    cost::MlpOptions o;
    o.seed = t.seed;
    model = cost::TrainMlp(train, o);
  } else {
    model = cost::TrainLasso(train, {.alpha = cost::SelectLassoAlpha(train, kLassoGrid)});
  }
  std::string report = fmt::format("samples {} (train {}, test {})\n", data.size(), train.size(),
                                   test.size()) +
                       FormatReport(cost::Evaluate(model, train, test));
  if (fl.output.empty()) {
    out << model.Serialize();
    err << report;
  } else {
    WriteFile(fl.output, model.Serialize());
    out << report;
  }
  return kExitOk;
}

int Eval(const std::vector<std::string>& files, int samples, const std::string& csv,
         const Flags& fl, std::ostream& out) {
  ToolConfig t = Resolve(fl);
  cost::AreaModel storage;
  const cost::AreaModel& model = ResolveModel(t, &storage);
  std::string s;
  if (files.empty()) {
    auto data = Dataset(csv, samples, t.seed);
    auto r = cost::Evaluate(model, {}, data);
    s = fmt::format("samples {}\nr2 {:.4f}\nmre {:.4f}\n", data.size(), r.r2_test, r.mre_test);
  } else {
    ir::Module m = LoadModule(files[0]);
    std::optional<ir::Trace> trace;
    if (files.size() > 1) trace = dse::Profile(m, LoadInputs(files[1]));
    auto cg = analysis::BuildCallGraph(m);
    auto sw = cost::LatencyTable::DefaultSoftware(), hw = cost::LatencyTable::DefaultHardware();
    sw.Override(t.sw_latency);
    hw.Override(t.hw_latency);
    s = "function\tarea_luts\town_area_luts\tsw_s\thw_s\n";
    for (const auto& f : m.functions()) {
      s += fmt::format("@{}\t{:.1f}\t{:.1f}", f.name,
                       model.Predict(cost::HierarchicalFeatures(m, f.name, cg)),
                       model.Predict(cost::OwnFeatures(f)));
      if (trace) {
        s += fmt::format("\t{}\t{}\n", cost::Latency(*trace, f.name, sw, t.clock_seconds),
                         cost::Latency(*trace, f.name, hw, t.clock_seconds));
      } else {
        s += "\t-\t-\n";
      }
    }
  }
  Emit(fl.output, s, out);
  return kExitOk;
}

int Partition(const std::vector<std::string>& files, const Flags& fl, std::ostream& out) {
  ToolConfig t = Resolve(fl);
  if (!t.area_budget) {
    throw ConfigError("budget", "partition needs a budget; 'sweep' scans a range of budgets");
  }
  if (t.mode == "sweep") throw ConfigError("mode", "partition takes a single configuration");
  auto progs = ProgramArgs(files);
  if (progs.size() != 1) throw UsageError("partition takes one program");
  auto pc = ToPipeline(t);
  if (t.mode.empty()) pc.configurations = {dse::Configuration::kFE};
  cost::AreaModel storage;
  const auto& model = ResolveModel(t, &storage);
  auto r = dse::RunPipeline(LoadModule(progs[0].first), LoadInputs(progs[0].second), pc, model);
  auto names = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& n : v) s += (s.empty() ? "@" : " @") + n;
    return s.empty() ? "-" : s;
  };
  std::string s;
  for (const auto& p : r.points) {
    s += fmt::format("config\t{}\n", dse::ConfigurationName(p.config));
    s += fmt::format("objective_s\t{}\nbaseline_s\t{}\nspeedup\t{}\n",
                     partition::ToSeconds(p.objective_ps), partition::ToSeconds(p.baseline_ps),
                     p.speedup);
    s += fmt::format("area_used\t{}\nbudget_luts\t{}\n", p.area_used, p.budget_luts);
    s += fmt::format("software\t{}\nhardware\t{}\nhardware_merged\t{}\n", names(p.software),
                     names(p.hardware_original), names(p.hardware_merged));
    s += fmt::format("breakdown_pct\t{:.2f} {:.2f} {:.2f}\n", p.software_pct, p.hardware_pct,
                     p.communication_pct);
  }
  Emit(fl.output, s, out);
  return kExitOk;
}

std::vector<double> Axis(const std::string& flag, const std::string& key,
                         std::optional<double> config_value, const std::vector<double>& preset,
                         bool force_preset) {
  if (force_preset) return preset;
  if (!flag.empty()) {
    std::vector<double> v;
    std::stringstream ss(flag);
    std::string item;
    while (std::getline(ss, item, ',')) {
      ToolConfig scratch;
      scratch.Set(key, item);
      if (key == "budget") v.push_back(*scratch.area_budget);
      if (key == "latency") v.push_back(*scratch.latency_cycles);
      if (key == "bandwidth") v.push_back(*scratch.bandwidth_bps);
    }
    return v;
  }
  if (config_value) return {*config_value};
  return preset;
}

int Explore(const std::vector<std::string>& files, const Flags& fl, bool lists,
            std::ostream& out) {
  Flags single = fl;
  if (lists) single.budget = single.latency = single.bandwidth = "";
  ToolConfig t = Resolve(single);
  auto progs = ProgramArgs(files);
  auto pc = ToPipeline(t);
  bool sweep_all = t.mode == "sweep";
  auto presets = dse::SweepGrid::Presets();
  dse::SweepGrid grid;
  grid.budgets = Axis(lists ? fl.budget : "", "budget", t.area_budget, presets.budgets, sweep_all);
  grid.latencies =
      Axis(lists ? fl.latency : "", "latency", t.latency_cycles, presets.latencies, sweep_all);
  grid.bandwidths =
      Axis(lists ? fl.bandwidth : "", "bandwidth", t.bandwidth_bps, presets.bandwidths, sweep_all);
  if (grid.size() > 1 || !t.area_budget) {
    spdlog::info("sweeping {} grid points per configuration", grid.size());
  }
  cost::AreaModel storage;
  const auto& model = ResolveModel(t, &storage);

  bool dir_mode = progs.size() > 1 || (!fl.output.empty() && fs::is_directory(fl.output));
  if (progs.size() > 1 && fl.output.empty()) {
    throw UsageError("several programs need -o DIR");
  }
  if (dir_mode) fs::create_directories(fl.output);
  for (const auto& [ir_path, heap_path] : progs) {
    auto report = dse::Sweep(LoadModule(ir_path), LoadInputs(heap_path), grid, pc, model, t.jobs);
    std::string stem = fs::path(ir_path).stem().string();
    report.program = stem;
    std::string csv = dse::ReportCsv(report);
    if (fl.output.empty()) {
      out << csv;
      continue;
    }
    std::string prefix = dir_mode ? (fs::path(fl.output) / stem).string() : fl.output;
    WriteFile(prefix + ".csv", csv);
    WriteFile(prefix + ".json", dse::ReportJson(report));
    spdlog::info("wrote {}.csv and {}.json", prefix, prefix);
  }
  return kExitOk;
}

}  // namespace

void ToolConfig::Set(std::string_view key_in, std::string_view value_in) {
  std::string key(Trim(key_in));
  std::string value(Trim(value_in));
  if (key == "budget" || key == "area_budget") {
    area_budget = ParseNonNegative("budget", value);
  } else if (key == "latency") {
    latency_cycles = ParseNonNegative("latency", value);
  } else if (key == "bandwidth") {
    double b = ParseNonNegative("bandwidth", value, /*allow_inf=*/true);
    if (b == 0) throw ConfigError("bandwidth", "bandwidth must be positive");
    bandwidth_bps = b;
  } else if (key == "clock") {
    clock_seconds = ParseNonNegative("clock", value);
  } else if (key == "mode") {
    if (value != "sweep" && !dse::ParseConfiguration(value)) {
      throw ConfigError("mode", fmt::format("mode must be FE, FLE, FE+Merging, FLE+Merging or "
                                            "sweep, got '{}'",
                                            value));
    }
    mode = value;
  } else if (key == "model") {
    model_path = value;
  } else if (key == "seed") {
    std::string_view v = value;
    uint64_t s = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
      throw ConfigError("seed", fmt::format("invalid value for seed: '{}'", value));
    }
    seed = s;
  } else if (key == "jobs") {
    jobs = static_cast<int>(ParseInteger("jobs", value, 1, 1024));
  } else if (key == "similarity_cutoff") {
    similarity_cutoff = ParseNonNegative("similarity_cutoff", value);
    if (similarity_cutoff > 1) {
      throw ConfigError("similarity_cutoff", "similarity_cutoff must lie in [0, 1]");
    }
  } else if (key == "merge_depth") {
    merge_depth = static_cast<int>(ParseInteger("merge_depth", value, 1, 2));
  } else if (key == "max_candidates") {
    max_candidates = static_cast<int>(ParseInteger("max_candidates", value, 0, 4096));
  } else if (key == "verify_trials") {
    verify_trials = static_cast<int>(ParseInteger("verify_trials", value, 1, 1'000'000));
  } else if (key == "sw_latency" || key == "hw_latency") {
    try {
      cost::LatencyTable::DefaultSoftware().Override(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, fmt::format("{}: {}", key, e.what()));
    }
    (key == "sw_latency" ? sw_latency : hw_latency) = value;
  } else {
    throw ConfigError(key, fmt::format("unknown configuration key '{}'", key));
  }
}

ToolConfig ParseConfig(std::string_view text, ToolConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", fmt::format("config line {}: expected 'key = value'", n));
    }
    try {
      base.Set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), fmt::format("config line {}: {}", n, e.what()));
    }
  }
  return base;
}

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mergedse: early design-space exploration of accelerators with function merging",
               "mergedse"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  Flags fl;
  std::vector<std::string> files;
  std::string program, first, second, kind = "mlp", csv;
  int samples = 600, trials = 200;

  auto* analyze = app.add_subcommand("analyze", "call graph, loops, profile and similar pairs");
  analyze->add_option("files", files, "program.ir [inputs.heap]")->required()->expected(1, 2);
  AddConfigFlag(analyze, &fl);
  AddClockFlag(analyze, &fl);
  AddOutputFlag(analyze, &fl, "write the table here instead of standard output");

  auto* transform = app.add_subcommand("transform", "outline loops into functions");
  transform->add_option("program", program, "program.ir")->required();
  AddOutputFlag(transform, &fl, "write the module here instead of standard output");

  auto* mrg = app.add_subcommand("merge", "merge two functions and print the module");
  mrg->add_option("program", program, "program.ir")->required();
  mrg->add_option("first", first, "first function (f_sel = 1)")->required();
  mrg->add_option("second", second, "second function")->required();
  std::string merged_name;
  mrg->add_option("--name", merged_name, "name of the merged function (default first__second)");
  AddOutputFlag(mrg, &fl, "write the module here instead of standard output");

  auto* train = app.add_subcommand("train", "train an area model on the synthetic dataset");
  train->add_option("--kind", kind, "mlp or lasso")->check(CLI::IsMember({"mlp", "lasso"}));
  train->add_option("--samples", samples, "generated dataset size")->check(CLI::Range(20, 1000000));
  train->add_option("--data", csv, "train on this dataset CSV instead");
  AddConfigFlag(train, &fl);
  AddSeedFlag(train, &fl);
  AddOutputFlag(train, &fl, "write the model here; the accuracy report goes to standard output");

  auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset or a program");
  eval->add_option("files", files, "[program.ir [inputs.heap]]")->expected(0, 2);
  eval->add_option("--samples", samples, "generated dataset size")->check(CLI::Range(20, 1000000));
  eval->add_option("--data", csv, "evaluate on this dataset CSV");
  AddConfigFlag(eval, &fl);
  AddClockFlag(eval, &fl);
  AddModelFlag(eval, &fl);
  AddSeedFlag(eval, &fl);
  AddOutputFlag(eval, &fl, "write the results here instead of standard output");

  auto* part = app.add_subcommand("partition", "partition one program at one budget");
  part->add_option("files", files, "program.ir [inputs.heap]")->required()->expected(1, 2);
  AddPointFlags(part, &fl);
  AddOutputFlag(part, &fl, "write the result here instead of standard output");

  auto* dse_cmd = app.add_subcommand(
      "dse", "run the pipeline; a missing budget, latency or bandwidth sweeps its presets");
  dse_cmd->add_option("files", files, "program.ir [inputs.heap] ...")->required();
  auto* sweep = app.add_subcommand(
      "sweep", "sweep budgets, latencies and bandwidths (comma-separated lists, presets if absent)");
  sweep->add_option("files", files, "program.ir [inputs.heap] ...")->required();
  for (auto* s : {dse_cmd, sweep}) {
    AddPointFlags(s, &fl);
    s->add_option("--jobs", fl.jobs, "worker threads (default 1)");
    AddOutputFlag(s, &fl,
                  "report prefix (writes PREFIX.csv and PREFIX.json) or directory; "
                  "default: CSV on standard output");
  }

  auto* verify = app.add_subcommand("verify", "differentially test a merged function");
  verify->add_option("program", program, "program.ir")->required();
  verify->add_option("functions", files, "merged function, or two functions to merge")
      ->required()
      ->expected(1, 2);
  verify->add_option("--trials", trials, "random inputs per f_sel side")
      ->check(CLI::Range(1, 1000000));
  AddConfigFlag(verify, &fl);
  AddSeedFlag(verify, &fl);
  AddOutputFlag(verify, &fl, "write the result here instead of standard output");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    SetupLogging();
    if (analyze->parsed()) return Analyze(files, fl, out);
    if (transform->parsed()) return Transform(program, fl, out);
    if (mrg->parsed()) return Merge(program, first, second, merged_name, fl, out, err);
    if (train->parsed()) return Train(kind, samples, csv, fl, out, err);
    if (eval->parsed()) return Eval(files, samples, csv, fl, out);
    if (part->parsed()) return Partition(files, fl, out);
    if (dse_cmd->parsed()) return Explore(files, fl, false, out);
    if (sweep->parsed()) return Explore(files, fl, true, out);
    if (verify->parsed()) {
      return Verify(program, files.at(0), files.size() > 1 ? files[1] : "", trials, fl, out);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ir::IrError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const cost::ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const dse::DseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace mergedse::cli
