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

// Software and accelerator latency from profiled dynamic opcode counts, and
// the estimated profitability of a merged accelerator.

#ifndef MERGEDSE_COST_LATENCY_H_
#define MERGEDSE_COST_LATENCY_H_

#include <string>
#include <string_view>

#include "mergedse/ir/interpreter.h"
#include "mergedse/ir/types.h"

namespace mergedse::cost {

// Cycles per dynamic instance of each opcode.
struct LatencyTable {
  ir::PerOpcode<double> cycles{};

  static LatencyTable DefaultSoftware();
  static LatencyTable DefaultHardware();

  // Applies "opcode=cycles" overrides separated by commas or whitespace.
  // Throws std::invalid_argument on an unknown opcode or a negative value.
  void Override(std::string_view spec);
};

inline constexpr double kDefaultClockSeconds = 1e-9;

// Sum over f's inclusive dynamic counts (f and everything it called) of
// count * cycles * clock. Zero when f never ran.
double Latency(const ir::Trace& trace, const std::string& f, const LatencyTable& table,
               double clock_seconds = kDefaultClockSeconds);

// The same over f's own body only (self counts), as used for partitioning
// where each callee pays for itself.
double SelfLatency(const ir::Trace& trace, const std::string& f, const LatencyTable& table,
                   double clock_seconds = kDefaultClockSeconds);

struct CostEstimate {
  double area = 0;      // LUTs, hierarchical: the standalone accelerator
  double own_area = 0;  // LUTs, own body only
  double hw = 0;        // seconds over the whole profile
  double sw = 0;        // seconds over the whole profile
};

// (sw1 + sw2 - hw12 - max(sw1 - hw1, sw2 - hw2)) / total: what a merged
// accelerator saves beyond the better of its two parents on its own.
// Throws std::invalid_argument when total <= 0.
double EstimateProfitability(double sw1, double sw2, double hw1, double hw2, double hw12,
                             double total);

}  // namespace mergedse::cost

#endif  // MERGEDSE_COST_LATENCY_H_
