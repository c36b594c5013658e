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

#ifndef MERGEDSE_IR_TYPES_H_
#define MERGEDSE_IR_TYPES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mergedse::ir {

enum class TypeTag : uint8_t { kVoid, kI1, kI32, kI64, kF64, kPtr };

std::string_view TypeName(TypeTag t);
std::optional<TypeTag> ParseTypeName(std::string_view s);

inline bool IsIntegerType(TypeTag t) {
  return t == TypeTag::kI1 || t == TypeTag::kI32 || t == TypeTag::kI64;
}

// Opcode order is significant: it fixes the column order of feature
// vectors, fingerprints and dataset files.
enum class Opcode : uint8_t {
  kAdd,
  kSub,
  kMul,
  kSDiv,
  kSRem,
  kAnd,
  kOr,
  kXor,
  kShl,
  kAShr,
  kFAdd,
  kFSub,
  kFMul,
  kFDiv,
  kICmp,
  kFCmp,
  kSelect,
  kZExt,
  kTrunc,
  kSIToFP,
  kFPToSI,
  kLoad,
  kStore,
  kGep,
  kConst,
  kAlloca,
  kCall,
  kBr,
  kJmp,
  kRet,
};

inline constexpr std::size_t kNumOpcodes =
    static_cast<std::size_t>(Opcode::kRet) + 1;

template <typename T>
using PerOpcode = std::array<T, kNumOpcodes>;

inline constexpr std::size_t OpIndex(Opcode op) {
  return static_cast<std::size_t>(op);
}

std::string_view OpcodeName(Opcode op);
std::optional<Opcode> ParseOpcodeName(std::string_view s);

inline bool IsTerminator(Opcode op) {
  return op == Opcode::kBr || op == Opcode::kJmp || op == Opcode::kRet;
}
inline bool IsIntBinary(Opcode op) {
  return op >= Opcode::kAdd && op <= Opcode::kAShr;
}
inline bool IsFloatBinary(Opcode op) {
  return op >= Opcode::kFAdd && op <= Opcode::kFDiv;
}
inline bool IsCast(Opcode op) {
  return op >= Opcode::kZExt && op <= Opcode::kFPToSI;
}

enum class Predicate : uint8_t {
  kNone,
  kEq,
  kNe,
  kSlt,
  kSgt,
  kSle,
  kSge,
  kOlt,
  kOgt,
  kOeq,
};

std::string_view PredicateName(Predicate p);
std::optional<Predicate> ParsePredicateName(std::string_view s);

inline bool IsIntPredicate(Predicate p) {
  return p >= Predicate::kEq && p <= Predicate::kSge;
}
inline bool IsFloatPredicate(Predicate p) {
  return p >= Predicate::kOlt && p <= Predicate::kOeq;
}

// Every scalar occupies one little-endian 8-byte slot in the heap.
inline constexpr uint64_t kSlotBytes = 8;

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_TYPES_H_
