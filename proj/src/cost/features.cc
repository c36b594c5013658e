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

#include "mergedse/cost/features.h"

#include "mergedse/ir/diagnostics.h"

namespace mergedse::cost {

FeatureVector OwnFeatures(const ir::Function& f) {
  FeatureVector v{};
  for (const auto& b : f.blocks) {
    for (const auto& i : b.instrs) v[ir::OpIndex(i.op)] += 1;
  }
  return v;
}

std::map<std::string, FeatureVector> AllHierarchicalFeatures(
    const ir::Module& m, const analysis::CallGraph& cg) {
  std::map<std::string, FeatureVector> out;
  for (const auto& name : cg.topo_order) {
    const ir::Function* f = m.Find(name);
    if (f == nullptr) continue;
    FeatureVector v = OwnFeatures(*f);
    auto it = cg.call_sites.find(name);
    if (it != cg.call_sites.end()) {
      for (const auto& [callee, sites] : it->second) {
        const FeatureVector& c = out.at(callee);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += sites * c[k];
      }
    }
    out[name] = v;
  }
  return out;
}

FeatureVector HierarchicalFeatures(const ir::Module& m, const std::string& f,
                                   const analysis::CallGraph& cg) {
  if (!m.Contains(f)) throw ir::IrError({{0, 0, "unknown function @" + f}});
  return AllHierarchicalFeatures(m, cg).at(f);
}

std::string FeatureName(std::size_t k) {
  return std::string(ir::OpcodeName(static_cast<ir::Opcode>(k)));
}

}  // namespace mergedse::cost
