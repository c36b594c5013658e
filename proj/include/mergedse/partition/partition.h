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

// Merging-aware hardware/software partitioning as a 0/1 program:
//
//   minimize  sum_i hwv_i hw_i + swv_i sw_i + sum_(i,j) frontier_ij cost_ij
//   s.t.      sum_i hwv_i area_i <= budget
//             each Root is realized exactly once by itself or a descendant
//             a hardware caller's Root callees are realized in hardware,
//               possibly by a descendant
//             frontier_ij >= swv_i + hwv_j - 1
//             swv_i + hwv_i <= 1, merged functions never in software.
//
// Times are integer picoseconds and areas integer LUTs so objectives
// compare exactly.

#ifndef MERGEDSE_PARTITION_PARTITION_H_
#define MERGEDSE_PARTITION_PARTITION_H_

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mergedse/ir/interpreter.h"
#include "mergedse/ir/module.h"

namespace mergedse::partition {

class PartitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int64_t ToPicoseconds(double seconds);
double ToSeconds(int64_t ps);

struct Interconnect {
  double latency_cycles = 25;
  double bandwidth_bps = std::numeric_limits<double>::infinity();
  double clock_seconds = 1e-9;
};

struct PartitionProblem {
  struct Node {
    std::string name;
    int64_t sw_ps = 0;  // own body in software over the profile
    int64_t hw_ps = 0;  // own body in hardware over the profile
    int64_t area = 0;   // own body, LUTs
    bool merged = false;
    std::vector<int> parents;  // merge parents (merged nodes only)
    std::vector<int> callees;  // C_i: direct and indirect
  };
  // A software caller reaching a hardware callee pays cost_ps.
  struct Edge {
    int caller = -1;
    int callee = -1;
    uint64_t calls = 0;
    uint64_t bytes = 0;
    int64_t cost_ps = 0;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int64_t area_budget = 0;
  int entry = -1;  // pinned to software when set

  // Derived by Finalize().
  std::vector<bool> root;
  std::vector<std::vector<int>> descend;       // recursive merge children
  std::vector<std::vector<int>> root_ancestors;  // Roots a merged node covers

  // Validates the instance and computes the derived sets. Throws
  // PartitionError on a cyclic call or merge graph, negative constants, bad
  // indices, or a merged node without two parents.
  void Finalize();

  // Recomputes every edge cost from its calls and bytes.
  void ApplyInterconnect(const Interconnect& ic);

  int Find(const std::string& name) const;
};

struct FunctionCost {
  double sw_seconds = 0;
  double hw_seconds = 0;
  double area_luts = 0;
};

// Assembles the instance for every function of m. Merge parents come from
// each function's provenance; calls and bytes from the all-software trace.
// Every direct edge i -> j is also charged on i -> k for each merged
// descendant k of j, since k replaces j when it is selected. Throws
// PartitionError when a function has no cost entry.
PartitionProblem BuildProblem(const ir::Module& m,
                              const std::map<std::string, FunctionCost>& costs,
                              const ir::Trace& trace, const Interconnect& ic,
                              double area_budget);

enum class Placement : uint8_t { kNone, kSoftware, kHardware };

struct PartitionSolution {
  std::vector<Placement> placement;
  std::vector<bool> frontier;  // per edge: software caller, hardware callee
  int64_t objective_ps = 0;
  int64_t software_ps = 0;
  int64_t hardware_ps = 0;
  int64_t communication_ps = 0;
  int64_t area_used = 0;
  bool optimal = true;
  uint64_t nodes_explored = 0;

  std::vector<std::string> Software(const PartitionProblem& p) const;
  std::vector<std::string> HardwareOriginal(const PartitionProblem& p) const;
  std::vector<std::string> HardwareMerged(const PartitionProblem& p) const;
};

// Fills frontier, the cost breakdown and area for a placement.
PartitionSolution Evaluate(const PartitionProblem& p, std::vector<Placement> placement);

// Names every violated constraint; empty when feasible.
std::vector<std::string> CheckSolution(const PartitionProblem& p, const PartitionSolution& s);

struct SolveOptions {
  uint64_t node_limit = 20'000'000;
};

// Exact branch and bound. When the node limit is hit the best solution found
// is returned with optimal = false.
PartitionSolution Solve(const PartitionProblem& p, const SolveOptions& opts = {});

// Exhaustive enumeration; throws PartitionError above 20 functions.
PartitionSolution SolveBruteForce(const PartitionProblem& p);

}  // namespace mergedse::partition

#endif  // MERGEDSE_PARTITION_PARTITION_H_
