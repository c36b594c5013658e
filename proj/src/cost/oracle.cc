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

#include "mergedse/cost/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fmt/core.h"

namespace mergedse::cost {
namespace {

using ir::Opcode;
using ir::OpIndex;

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Archetype {
  std::vector<std::pair<Opcode, double>> mix;
};

// Opcode profiles of common kernel shapes; a sample blends one or two.
const std::vector<Archetype>& Archetypes() {
  using O = Opcode;
  static const auto* a = new std::vector<Archetype>{
      // Integer array loop.
      {{{O::kAdd, 3}, {O::kICmp, 1}, {O::kBr, 1}, {O::kJmp, 0.5}, {O::kLoad, 1},
        {O::kStore, 0.5}, {O::kGep, 1}, {O::kMul, 0.3}, {O::kConst, 0.5}}},
      // Floating-point kernel.
      {{{O::kFAdd, 1}, {O::kFMul, 1}, {O::kLoad, 1.5}, {O::kStore, 0.5}, {O::kGep, 1.5},
        {O::kAdd, 1}, {O::kICmp, 1}, {O::kBr, 1}, {O::kFDiv, 0.1}, {O::kSIToFP, 0.2},
        {O::kFSub, 0.3}, {O::kFCmp, 0.2}}},
      // Bit manipulation and table lookups.
      {{{O::kAnd, 1}, {O::kOr, 0.5}, {O::kXor, 0.7}, {O::kShl, 0.7}, {O::kAShr, 0.7},
        {O::kLoad, 1}, {O::kStore, 1}, {O::kGep, 1}, {O::kAdd, 1}, {O::kICmp, 1},
        {O::kBr, 1}, {O::kSelect, 0.3}, {O::kTrunc, 0.2}, {O::kZExt, 0.2}}},
      // Search and control.
      {{{O::kICmp, 2}, {O::kBr, 2}, {O::kJmp, 1}, {O::kAdd, 1}, {O::kLoad, 1},
        {O::kSelect, 0.5}, {O::kCall, 0.2}, {O::kSub, 0.3}}},
      // Arithmetic.
      {{{O::kMul, 1}, {O::kSDiv, 0.3}, {O::kSRem, 0.3}, {O::kAdd, 1}, {O::kSub, 1},
        {O::kConst, 0.5}, {O::kFPToSI, 0.1}, {O::kAlloca, 0.05}}},
  };
  return *a;
}

}  // namespace

OracleParams OracleParams::Default() {
  OracleParams p;
  p.base_luts.fill(0);
  p.shared.fill(false);
  auto set = [&](Opcode op, double luts, bool shared = false) {
    p.base_luts[OpIndex(op)] = luts;
    p.shared[OpIndex(op)] = shared;
  };
  set(Opcode::kAdd, 40);
  set(Opcode::kSub, 40);
  set(Opcode::kAnd, 20);
  set(Opcode::kOr, 20);
  set(Opcode::kXor, 20);
  set(Opcode::kShl, 60);
  set(Opcode::kAShr, 60);
  set(Opcode::kICmp, 30);
  set(Opcode::kSelect, 35);
  set(Opcode::kZExt, 5);
  set(Opcode::kTrunc, 5);
  set(Opcode::kLoad, 80);
  set(Opcode::kStore, 80);
  set(Opcode::kGep, 40);
  set(Opcode::kConst, 8);
  set(Opcode::kAlloca, 64);
  set(Opcode::kCall, 120);
  set(Opcode::kRet, 20);
  set(Opcode::kMul, 600, true);
  set(Opcode::kSDiv, 1500, true);
  set(Opcode::kSRem, 1500, true);
  set(Opcode::kFAdd, 700, true);
  set(Opcode::kFSub, 700, true);
  set(Opcode::kFMul, 900, true);
  set(Opcode::kFDiv, 2500, true);
  set(Opcode::kFCmp, 150, true);
  set(Opcode::kSIToFP, 300, true);
  set(Opcode::kFPToSI, 300, true);
  return p;
}

double SyntheticHlsOracle(const FeatureVector& fv, uint64_t seed, const OracleParams& p) {
  double luts = p.floor_luts;
  uint64_t h = SplitMix(seed);
  for (std::size_t k = 0; k < fv.size(); ++k) {
    double c = std::max(0.0, fv[k]);
    luts += p.shared[k] ? p.base_luts[k] * std::pow(c, p.sharing_exponent) : p.base_luts[k] * c;
    h = SplitMix(h ^ static_cast<uint64_t>(std::llround(c * 1024)));
  }
  luts += p.luts_per_branch *
          (fv[OpIndex(Opcode::kBr)] + fv[OpIndex(Opcode::kJmp)]);
  double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
  return luts * (1 + p.noise * (2 * u - 1));
}

FeatureVector SampleFeatures(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::lognormal_distribution<double> jitter(0, 0.4);
  const auto& arch = Archetypes();
  double size = std::exp(std::log(4.0) + unit(rng) * (std::log(300.0) - std::log(4.0)));
  const Archetype& a = arch[rng() % arch.size()];
  const Archetype& b = arch[rng() % arch.size()];
  double blend = unit(rng) < 0.5 ? 1.0 : unit(rng);
  ir::PerOpcode<double> weight{};
  for (auto [op, w] : a.mix) weight[OpIndex(op)] += blend * w;
  for (auto [op, w] : b.mix) weight[OpIndex(op)] += (1 - blend) * w;
  for (double& w : weight) {
    if (w > 0 && unit(rng) < 0.15) w = 0;
    w *= jitter(rng);
  }
  double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  FeatureVector v{};
  for (std::size_t k = 0; k < v.size() && total > 0; ++k) {
    v[k] = std::round(size * weight[k] / total);
  }
  v[OpIndex(Opcode::kRet)] = 1;
  return v;
}

std::vector<Sample> GenerateDataset(int n, uint64_t seed) {
  std::vector<Sample> out(n);
  for (int k = 0; k < n; ++k) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(k)};
    std::mt19937_64 rng(seq);
    out[k].name = fmt::format("syn{:04d}", k);
    out[k].features = SampleFeatures(rng);
    out[k].luts = SyntheticHlsOracle(out[k].features, seed * 1000003 + k);
  }
  return out;
}

std::string DatasetToCsv(const std::vector<Sample>& data) {
  std::string s = "name";
  for (std::size_t k = 0; k < ir::kNumOpcodes; ++k) s += "," + FeatureName(k);
  s += ",luts\n";
  for (const auto& r : data) {
    s += r.name;
    for (double c : r.features) s += fmt::format(",{}", c);
    s += fmt::format(",{}\n", r.luts);
  }
  return s;
}

std::vector<Sample> DatasetFromCsv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::vector<Sample> out;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line_no == 1) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != ir::kNumOpcodes + 2) {
      throw std::runtime_error(fmt::format("dataset line {}: expected {} columns, got {}",
                                           line_no, ir::kNumOpcodes + 2, cells.size()));
    }
    Sample s;
    s.name = cells[0];
    try {
      for (std::size_t k = 0; k < ir::kNumOpcodes; ++k) s.features[k] = std::stod(cells[k + 1]);
      s.luts = std::stod(cells.back());
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("dataset line {}: bad number", line_no));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void SplitDataset(const std::vector<Sample>& data, double train_fraction, uint64_t seed,
                  std::vector<Sample>* train, std::vector<Sample>* test) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::size_t n_train = static_cast<std::size_t>(std::llround(train_fraction * data.size()));
  train->clear();
  test->clear();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    (k < n_train ? train : test)->push_back(data[idx[k]]);
  }
}

}  // namespace mergedse::cost
