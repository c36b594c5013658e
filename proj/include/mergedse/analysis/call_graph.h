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

#ifndef MERGEDSE_ANALYSIS_CALL_GRAPH_H_
#define MERGEDSE_ANALYSIS_CALL_GRAPH_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mergedse/ir/module.h"

namespace mergedse::analysis {

struct CallGraph {
  // Direct callees of each function (every module function has an entry).
  std::map<std::string, std::set<std::string>> direct;
  // C_i: direct and indirect callees.
  std::map<std::string, std::set<std::string>> transitive;
  // Static call-site multiplicity per (caller, callee).
  std::map<std::string, std::map<std::string, int>> call_sites;
  // Callees before callers.
  std::vector<std::string> topo_order;

  const std::set<std::string>& Callees(const std::string& f) const;
  const std::set<std::string>& TransitiveCallees(const std::string& f) const;
};

// Throws ir::IrError if the calls form a cycle.
CallGraph BuildCallGraph(const ir::Module& m);

}  // namespace mergedse::analysis

#endif  // MERGEDSE_ANALYSIS_CALL_GRAPH_H_
