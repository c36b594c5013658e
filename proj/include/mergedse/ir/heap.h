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

// Heap images: the memory and arguments for one entry-function invocation.
//
// File format, one directive per line, '#' or ';' start comments:
//
//   region <name> <byte-length> [<hex-bytes>]   zero-filled past the hex
//   arg <index> = <literal | region-name>
//   ---                                          starts the next invocation
//
// Regions are laid out in declaration order in one flat arena, each at an
// 8-byte aligned address; a region-name argument passes its base address.

#ifndef MERGEDSE_IR_HEAP_H_
#define MERGEDSE_IR_HEAP_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mergedse/ir/module.h"

namespace mergedse::ir {

struct Region {
  std::string name;
  std::vector<uint8_t> bytes;
  bool operator==(const Region&) const = default;
};

struct ArgSpec {
  enum class Kind : uint8_t { kLiteral, kRegion };
  Kind kind = Kind::kLiteral;
  Literal literal;
  std::string region;

  static ArgSpec Lit(Literal l) { return {Kind::kLiteral, l, {}}; }
  static ArgSpec Ref(std::string r) { return {Kind::kRegion, {}, std::move(r)}; }
  bool operator==(const ArgSpec&) const = default;
};

struct Invocation {
  std::vector<Region> regions;
  std::vector<ArgSpec> args;
  bool operator==(const Invocation&) const = default;
};

// Address of the first region. Addresses below it fault, so null does too.
inline constexpr uint64_t kArenaBase = 16;

// Throws IrError on malformed input.
std::vector<Invocation> ParseHeapFile(std::string_view text);
std::string PrintHeapFile(const std::vector<Invocation>& invocations);

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_HEAP_H_
