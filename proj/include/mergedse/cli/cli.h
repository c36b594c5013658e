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

// The mergedse command line: subcommands, the key = value configuration
// file and the exit-code contract.

#ifndef MERGEDSE_CLI_CLI_H_
#define MERGEDSE_CLI_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mergedse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,     // unreadable or invalid input, bad configuration
  kExitInternal = 3,  // an internal invariant failed
};

// A bad configuration value; what() names the field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ToolConfig {
  std::optional<double> area_budget;     // LUTs
  std::optional<double> latency_cycles;  // interconnect, per call
  std::optional<double> bandwidth_bps;   // bytes/s, may be inf
  double clock_seconds = 1e-9;
  std::string mode;  // FE, FLE, FE+Merging, FLE+Merging, sweep; empty: all
  std::string model_path;
  uint64_t seed = 7;
  int jobs = 1;
  double similarity_cutoff = 0.5;
  int merge_depth = 2;
  int max_candidates = 32;
  int verify_trials = 200;
  std::string sw_latency;  // "op=cycles, ..." overrides
  std::string hw_latency;

  // Applies one setting. Throws ConfigError on an unknown key or a bad value.
  void Set(std::string_view key, std::string_view value);
};

// Parses a configuration file: one "key = value" per line, '#' starts a
// comment. Keys: budget, latency, bandwidth, clock, mode, model, seed,
// jobs, similarity_cutoff, merge_depth, max_candidates, verify_trials,
// sw_latency, hw_latency.
ToolConfig ParseConfig(std::string_view text, ToolConfig base = {});

// Runs the tool. args excludes the program name. Diagnostics go to err,
// data to out unless -o names a file.
int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mergedse::cli

#endif  // MERGEDSE_CLI_CLI_H_
