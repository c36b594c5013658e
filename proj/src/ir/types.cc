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

#include "mergedse/ir/types.h"

#include <string_view>

namespace mergedse::ir {
namespace {

constexpr std::string_view kOpcodeNames[kNumOpcodes] = {
    "add",  "sub",   "mul",    "sdiv",   "srem",   "and",  "or",
    "xor",  "shl",   "ashr",   "fadd",   "fsub",   "fmul", "fdiv",
    "icmp", "fcmp",  "select", "zext",   "trunc",  "sitofp",
    "fptosi", "load", "store", "gep",    "const",  "alloca", "call",
    "br",   "jmp",   "ret"};

constexpr std::string_view kPredicateNames[] = {
    "", "eq", "ne", "slt", "sgt", "sle", "sge", "olt", "ogt", "oeq"};

constexpr std::string_view kTypeNames[] = {"void", "i1",  "i32",
                                           "i64",  "f64", "ptr"};

}  // namespace

std::string_view TypeName(TypeTag t) {
  return kTypeNames[static_cast<int>(t)];
}

std::optional<TypeTag> ParseTypeName(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (kTypeNames[i] == s) return static_cast<TypeTag>(i);
  }
  return std::nullopt;
}

std::string_view OpcodeName(Opcode op) { return kOpcodeNames[OpIndex(op)]; }

std::optional<Opcode> ParseOpcodeName(std::string_view s) {
  for (std::size_t i = 0; i < kNumOpcodes; ++i) {
    if (kOpcodeNames[i] == s) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

std::string_view PredicateName(Predicate p) {
  return kPredicateNames[static_cast<int>(p)];
}

std::optional<Predicate> ParsePredicateName(std::string_view s) {
  for (int i = 1; i < 10; ++i) {
    if (kPredicateNames[i] == s) return static_cast<Predicate>(i);
  }
  return std::nullopt;
}

}  // namespace mergedse::ir
