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

#ifndef MERGEDSE_ANALYSIS_LOOP_EXTRACTION_H_
#define MERGEDSE_ANALYSIS_LOOP_EXTRACTION_H_

#include <string>
#include <vector>

#include "mergedse/ir/module.h"

namespace mergedse::analysis {

struct ExtractionResult {
  ir::Module module;
  std::vector<std::string> extracted;  // names of the new functions
  std::vector<std::string> warnings;   // loops left in place, and why
};

// Outlines every outermost natural loop of every original function into a
// new function @<f>_loop<k> and replaces it with a call. The loop's live-in
// registers become parameters. A single exit with at most one live-out
// returns it directly; otherwise the caller passes an alloca'd out-ptr that
// receives the live-outs, and with several exits the callee returns the
// exit index. Loops containing alloca and functions with irreducible
// control flow are left alone.
ExtractionResult ExtractLoops(const ir::Module& m);

}  // namespace mergedse::analysis

#endif  // MERGEDSE_ANALYSIS_LOOP_EXTRACTION_H_
