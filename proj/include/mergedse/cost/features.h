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

// Static opcode-count features for area prediction.

#ifndef MERGEDSE_COST_FEATURES_H_
#define MERGEDSE_COST_FEATURES_H_

#include <map>
#include <string>

#include "mergedse/analysis/call_graph.h"
#include "mergedse/ir/module.h"
#include "mergedse/ir/types.h"

namespace mergedse::cost {

// One count per opcode, in Opcode order.
using FeatureVector = ir::PerOpcode<double>;

FeatureVector OwnFeatures(const ir::Function& f);

// Own counts plus, for every static call site, the callee's hierarchical
// counts.
FeatureVector HierarchicalFeatures(const ir::Module& m, const std::string& f,
                                   const analysis::CallGraph& cg);

// Hierarchical features of every function, computed bottom-up.
std::map<std::string, FeatureVector> AllHierarchicalFeatures(
    const ir::Module& m, const analysis::CallGraph& cg);

// Column names in feature order (the opcode mnemonics).
std::string FeatureName(std::size_t k);

}  // namespace mergedse::cost

#endif  // MERGEDSE_COST_FEATURES_H_
