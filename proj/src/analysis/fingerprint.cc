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

#include "mergedse/analysis/fingerprint.h"

#include <algorithm>

namespace mergedse::analysis {

Fingerprint ComputeFingerprint(const ir::Function& f) {
  Fingerprint fp;
  for (const auto& b : f.blocks) {
    for (const auto& inst : b.instrs) {
      ++fp.counts[ir::OpIndex(inst.op)];
      ++fp.size;
    }
  }
  return fp;
}

namespace {
uint32_t Shared(const Fingerprint& a, const Fingerprint& b) {
  uint32_t s = 0;
  for (std::size_t k = 0; k < ir::kNumOpcodes; ++k) s += std::min(a.counts[k], b.counts[k]);
  return s;
}
}  // namespace

double Similarity(const Fingerprint& a, const Fingerprint& b) {
  uint32_t denom = std::max(a.size, b.size);
  return denom == 0 ? 0.0 : static_cast<double>(Shared(a, b)) / denom;
}

std::vector<RankedPair> RankPairs(const std::vector<std::string>& names,
                                  const std::vector<Fingerprint>& prints,
                                  double min_similarity) {
  // Rank by name once so the sort below works on small index records.
  std::vector<uint32_t> order;
  for (uint32_t i = 0; i < names.size(); ++i) {
    if (prints[i].size >= kMinRankedSize) order.push_back(i);
  }
  std::sort(order.begin(), order.end(),
            [&](uint32_t a, uint32_t b) { return names[a] < names[b]; });

  struct Slot {
    uint32_t first, second;  // positions in `order`
    uint32_t shared, max_size;
  };
  std::vector<Slot> slots;
  for (uint32_t x = 0; x < order.size(); ++x) {
    for (uint32_t y = x + 1; y < order.size(); ++y) {
      const Fingerprint& a = prints[order[x]];
      const Fingerprint& b = prints[order[y]];
      uint32_t shared = Shared(a, b), max_size = std::max(a.size, b.size);
      if (static_cast<double>(shared) / max_size < min_similarity) continue;
      slots.push_back({x, y, shared, max_size});
    }
  }
  // Exact comparison of the ratios by cross-multiplication.
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    uint64_t lhs = uint64_t{a.shared} * b.max_size, rhs = uint64_t{b.shared} * a.max_size;
    if (lhs != rhs) return lhs > rhs;
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });

  std::vector<RankedPair> out;
  out.reserve(slots.size());
  for (const Slot& s : slots) {
    RankedPair p;
    p.first = names[order[s.first]];
    p.second = names[order[s.second]];
    p.shared = s.shared;
    p.max_size = s.max_size;
    p.similarity = static_cast<double>(s.shared) / s.max_size;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RankedPair> RankPairs(const ir::Module& m) {
  std::vector<std::string> names;
  std::vector<Fingerprint> prints;
  for (const auto& f : m.functions()) {
    names.push_back(f.name);
    prints.push_back(ComputeFingerprint(f));
  }
  return RankPairs(names, prints);
}

}  // namespace mergedse::analysis
