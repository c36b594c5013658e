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

#ifndef MERGEDSE_ANALYSIS_FINGERPRINT_H_
#define MERGEDSE_ANALYSIS_FINGERPRINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mergedse/ir/module.h"
#include "mergedse/ir/types.h"

namespace mergedse::analysis {

// Static opcode histogram of a function's own body.
struct Fingerprint {
  ir::PerOpcode<uint32_t> counts{};
  uint32_t size = 0;
};

Fingerprint ComputeFingerprint(const ir::Function& f);

// Shared instructions over the larger size: sum of per-opcode minima
// divided by max(size_a, size_b). 0 when both are empty.
double Similarity(const Fingerprint& a, const Fingerprint& b);

struct RankedPair {
  std::string first;  // first < second lexicographically
  std::string second;
  uint32_t shared = 0;
  uint32_t max_size = 0;
  double similarity = 0.0;
};

inline constexpr uint32_t kMinRankedSize = 5;

// All pairs of functions with at least kMinRankedSize instructions each,
// by descending similarity, then by name pair. Pairs below min_similarity
// are dropped.
std::vector<RankedPair> RankPairs(const std::vector<std::string>& names,
                                  const std::vector<Fingerprint>& prints,
                                  double min_similarity = 0.0);
std::vector<RankedPair> RankPairs(const ir::Module& m);

}  // namespace mergedse::analysis

#endif  // MERGEDSE_ANALYSIS_FINGERPRINT_H_
