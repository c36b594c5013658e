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

#include "mergedse/ir/random_inputs.h"

#include <bit>
#include <cmath>

#include "fmt/core.h"

namespace mergedse::ir {
namespace {

// Avoids std distributions so sequences are identical across standard
// library implementations.
int64_t UniformInt(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(rng() % span);
}

double UniformDouble(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  // Quantized to 1/64 so values print exactly and sums stay tame.
  return std::round((lo + (hi - lo) * u) * 64.0) / 64.0;
}

void PutSlot(std::vector<uint8_t>& bytes, std::size_t slot, uint64_t v) {
  for (int k = 0; k < 8 && slot * 8 + k < bytes.size(); ++k) {
    bytes[slot * 8 + k] = static_cast<uint8_t>(v >> (8 * k));
  }
}

uint64_t GetSlot(const std::vector<uint8_t>& bytes, std::size_t slot) {
  uint64_t v = 0;
  for (int k = 7; k >= 0; --k) {
    std::size_t i = slot * 8 + k;
    v = (v << 8) | (i < bytes.size() ? bytes[i] : 0);
  }
  return v;
}

bool LooksLikeDouble(uint64_t bits) {
  int64_t as_int = static_cast<int64_t>(bits);
  if (as_int > -(int64_t{1} << 40) && as_int < (int64_t{1} << 40)) return false;
  double d = std::bit_cast<double>(bits);
  return std::isfinite(d);
}

}  // namespace

Invocation RandomInvocation(const Function& f, std::mt19937_64& rng,
                            const RandomInputOptions& opts) {
  Invocation inv;
  for (std::size_t k = 0; k < f.params.size(); ++k) {
    switch (f.ParamType(k)) {
      case TypeTag::kI1:
        inv.args.push_back(ArgSpec::Lit(Literal::Bool(rng() & 1)));
        break;
      case TypeTag::kI32:
      case TypeTag::kI64: {
        int64_t v = (rng() % 10 < 7) ? UniformInt(rng, 0, opts.small_int_max)
                                     : UniformInt(rng, -opts.wide_int_bound, opts.wide_int_bound);
        inv.args.push_back(ArgSpec::Lit(Literal::Int(v)));
        break;
      }
      case TypeTag::kF64:
        inv.args.push_back(ArgSpec::Lit(Literal::Float(UniformDouble(rng, -100.0, 100.0))));
        break;
      case TypeTag::kPtr: {
        Region r{fmt::format("p{}", k), std::vector<uint8_t>(opts.region_slots * 8, 0)};
        for (uint64_t s = 0; s < opts.region_slots; ++s) {
          uint64_t v = opts.fill_doubles
                           ? std::bit_cast<uint64_t>(UniformDouble(rng, -100.0, 100.0))
                           : static_cast<uint64_t>(UniformInt(rng, 0, opts.small_int_max - 1));
          PutSlot(r.bytes, s, v);
        }
        inv.args.push_back(ArgSpec::Ref(r.name));
        inv.regions.push_back(std::move(r));
        break;
      }
      case TypeTag::kVoid:
        break;
    }
  }
  return inv;
}

Invocation RandomizeInvocation(const Invocation& tmpl, std::mt19937_64& rng) {
  Invocation inv = tmpl;
  for (auto& r : inv.regions) {
    const std::size_t slots = (r.bytes.size() + 7) / 8;
    int64_t max_int = 1;
    for (std::size_t s = 0; s < slots; ++s) {
      uint64_t v = GetSlot(r.bytes, s);
      if (!LooksLikeDouble(v)) max_int = std::max(max_int, std::abs(static_cast<int64_t>(v)));
    }
    for (std::size_t s = 0; s < slots; ++s) {
      uint64_t v = GetSlot(r.bytes, s);
      if (LooksLikeDouble(v)) {
        PutSlot(r.bytes, s, std::bit_cast<uint64_t>(UniformDouble(rng, -100.0, 100.0)));
      } else {
        PutSlot(r.bytes, s, static_cast<uint64_t>(UniformInt(rng, 0, max_int)));
      }
    }
  }
  for (auto& a : inv.args) {
    if (a.kind != ArgSpec::Kind::kLiteral) continue;
    Literal& l = a.literal;
    switch (l.kind) {
      case Literal::Kind::kBool:
        l.int_value = static_cast<int64_t>(rng() & 1);
        break;
      case Literal::Kind::kFloat:
        l.float_value = UniformDouble(rng, -100.0, 100.0);
        break;
      case Literal::Kind::kInt:
        l.int_value = l.int_value >= 0 ? UniformInt(rng, 0, l.int_value)
                                       : UniformInt(rng, l.int_value, 0);
        break;
    }
  }
  return inv;
}

}  // namespace mergedse::ir
