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

// A synthetic stand-in for HLS area reports, and the training datasets built
// from it. The oracle is deliberately nonlinear: expensive functional units
// are shared, so their cost grows as count^0.85.

#ifndef MERGEDSE_COST_ORACLE_H_
#define MERGEDSE_COST_ORACLE_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mergedse/cost/features.h"

namespace mergedse::cost {

struct OracleParams {
  ir::PerOpcode<double> base_luts;  // per instance
  ir::PerOpcode<bool> shared;       // cost * count^exponent instead of linear
  double sharing_exponent = 0.85;
  double luts_per_branch = 45;      // br and jmp
  double floor_luts = 250;          // FSM and interface logic
  double noise = 0.05;              // multiplicative, uniform in [-noise, noise]

  static OracleParams Default();
};

// Deterministic in (fv, seed); always positive.
double SyntheticHlsOracle(const FeatureVector& fv, uint64_t seed,
                          const OracleParams& p = OracleParams::Default());

struct Sample {
  std::string name;
  FeatureVector features{};
  double luts = 0;
};

// A random function-like opcode mix of 4 to 300 instructions: a blend of one
// or two kernel profiles (integer loop, floating point, bit twiddling,
// search, arithmetic) with per-opcode jitter and dropout.
FeatureVector SampleFeatures(std::mt19937_64& rng);

// n samples labelled by the oracle. Sample k depends only on (seed, k).
std::vector<Sample> GenerateDataset(int n, uint64_t seed);

// CSV: name, one column per opcode, luts.
std::string DatasetToCsv(const std::vector<Sample>& data);
// Throws std::runtime_error naming the line on malformed input.
std::vector<Sample> DatasetFromCsv(std::string_view csv);

// Deterministic shuffle, then the first round(train_fraction * n) rows
// become the training split.
void SplitDataset(const std::vector<Sample>& data, double train_fraction, uint64_t seed,
                  std::vector<Sample>* train, std::vector<Sample>* test);

}  // namespace mergedse::cost

#endif  // MERGEDSE_COST_ORACLE_H_
