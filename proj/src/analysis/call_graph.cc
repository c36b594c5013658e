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

#include "mergedse/analysis/call_graph.h"

#include <functional>

#include "fmt/core.h"
#include "mergedse/ir/diagnostics.h"

namespace mergedse::analysis {

namespace {
const std::set<std::string>& Lookup(const std::map<std::string, std::set<std::string>>& m,
                                    const std::string& f) {
  static const std::set<std::string> kEmpty;
  auto it = m.find(f);
  return it == m.end() ? kEmpty : it->second;
}
}  // namespace

const std::set<std::string>& CallGraph::Callees(const std::string& f) const {
  return Lookup(direct, f);
}

const std::set<std::string>& CallGraph::TransitiveCallees(const std::string& f) const {
  return Lookup(transitive, f);
}

CallGraph BuildCallGraph(const ir::Module& m) {
  CallGraph cg;
  for (const auto& f : m.functions()) {
    auto& d = cg.direct[f.name];
    auto& sites = cg.call_sites[f.name];
    for (const auto& b : f.blocks) {
      for (const auto& inst : b.instrs) {
        if (inst.op != ir::Opcode::kCall) continue;
        d.insert(inst.callee);
        ++sites[inst.callee];
      }
    }
  }
  // Post-order DFS gives callees before callers; a grey node reached again
  // closes a cycle.
  enum class Mark { kWhite, kGrey, kBlack };
  std::map<std::string, Mark> mark;
  std::function<void(const std::string&)> visit = [&](const std::string& f) {
    mark[f] = Mark::kGrey;
    auto& closure = cg.transitive[f];
    for (const auto& g : cg.Callees(f)) {
      Mark gm = mark.count(g) ? mark[g] : Mark::kWhite;
      if (gm == Mark::kGrey) {
        throw ir::IrError({{0, 0, fmt::format("recursive call cycle through @{} and @{}", f, g), f}});
      }
      if (gm == Mark::kWhite) visit(g);
      closure.insert(g);
      const auto& sub = cg.transitive[g];
      closure.insert(sub.begin(), sub.end());
    }
    mark[f] = Mark::kBlack;
    cg.topo_order.push_back(f);
  };
  for (const auto& f : m.functions()) {
    if (!mark.count(f.name)) visit(f.name);
  }
  return cg;
}

}  // namespace mergedse::analysis
