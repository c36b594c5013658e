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

#include "mergedse/cost/latency.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <stdexcept>

#include "fmt/core.h"

namespace mergedse::cost {
namespace {

using ir::Opcode;
using ir::OpIndex;

LatencyTable Common() {
  LatencyTable t;
  for (std::size_t k = 0; k < ir::kNumOpcodes; ++k) {
    Opcode op = static_cast<Opcode>(k);
    if (ir::IsIntBinary(op) || ir::IsCast(op) || op == Opcode::kICmp ||
        op == Opcode::kSelect || op == Opcode::kGep || op == Opcode::kConst ||
        op == Opcode::kAlloca || op == Opcode::kRet) {
      t.cycles[k] = 1;
    }
  }
  t.cycles[OpIndex(Opcode::kMul)] = 3;
  t.cycles[OpIndex(Opcode::kSDiv)] = 20;
  t.cycles[OpIndex(Opcode::kSRem)] = 20;
  t.cycles[OpIndex(Opcode::kFAdd)] = 4;
  t.cycles[OpIndex(Opcode::kFSub)] = 4;
  t.cycles[OpIndex(Opcode::kFCmp)] = 4;
  t.cycles[OpIndex(Opcode::kFMul)] = 5;
  t.cycles[OpIndex(Opcode::kFDiv)] = 15;
  t.cycles[OpIndex(Opcode::kSIToFP)] = 4;
  t.cycles[OpIndex(Opcode::kFPToSI)] = 4;
  return t;
}

}  // namespace

LatencyTable LatencyTable::DefaultSoftware() {
  LatencyTable t = Common();
  t.cycles[OpIndex(Opcode::kLoad)] = 4;
  t.cycles[OpIndex(Opcode::kStore)] = 4;
  t.cycles[OpIndex(Opcode::kBr)] = 1;
  t.cycles[OpIndex(Opcode::kJmp)] = 1;
  t.cycles[OpIndex(Opcode::kCall)] = 10;
  return t;
}

LatencyTable LatencyTable::DefaultHardware() {
  LatencyTable t = Common();
  t.cycles[OpIndex(Opcode::kLoad)] = 2;
  t.cycles[OpIndex(Opcode::kStore)] = 2;
  // Branches fold into the FSM; calls inside an accelerator are wired
  // sub-accelerators and cost nothing extra.
  t.cycles[OpIndex(Opcode::kBr)] = 0;
  t.cycles[OpIndex(Opcode::kJmp)] = 0;
  t.cycles[OpIndex(Opcode::kRet)] = 0;
  t.cycles[OpIndex(Opcode::kCall)] = 0;
  return t;
}

void LatencyTable::Override(std::string_view spec) {
  std::string s(spec);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t start = s.find_first_not_of(" \t\n", pos);
    if (start == std::string::npos) break;
    std::size_t end = s.find_first_of(" \t\n", start);
    if (end == std::string::npos) end = s.size();
    std::string item = s.substr(start, end - start);
    pos = end;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(fmt::format("latency override '{}' is not opcode=cycles", item));
    }
    auto op = ir::ParseOpcodeName(item.substr(0, eq));
    if (!op) throw std::invalid_argument(fmt::format("unknown opcode '{}'", item.substr(0, eq)));
    double v = 0;
    const char* first = item.data() + eq + 1;
    const char* last = item.data() + item.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || v < 0) {
      throw std::invalid_argument(fmt::format("bad cycle count in '{}'", item));
    }
    cycles[OpIndex(*op)] = v;
  }
}

namespace {

double Weighted(const std::map<std::string, ir::PerOpcode<uint64_t>>& counts, const std::string& f,
                const LatencyTable& table, double clock_seconds) {
  auto it = counts.find(f);
  if (it == counts.end()) return 0;
  double cycles = 0;
  for (std::size_t k = 0; k < ir::kNumOpcodes; ++k) {
    cycles += static_cast<double>(it->second[k]) * table.cycles[k];
  }
  return cycles * clock_seconds;
}

}  // namespace

double Latency(const ir::Trace& trace, const std::string& f, const LatencyTable& table,
               double clock_seconds) {
  return Weighted(trace.inclusive_counts, f, table, clock_seconds);
}

double SelfLatency(const ir::Trace& trace, const std::string& f, const LatencyTable& table,
                   double clock_seconds) {
  return Weighted(trace.self_counts, f, table, clock_seconds);
}

double EstimateProfitability(double sw1, double sw2, double hw1, double hw2, double hw12,
                             double total) {
  if (!(total > 0)) throw std::invalid_argument("total execution time must be positive");
  return (sw1 + sw2 - hw12 - std::max(sw1 - hw1, sw2 - hw2)) / total;
}

}  // namespace mergedse::cost
