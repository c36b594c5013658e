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

#ifndef MERGEDSE_IR_INTERPRETER_H_
#define MERGEDSE_IR_INTERPRETER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mergedse/ir/heap.h"
#include "mergedse/ir/module.h"

namespace mergedse::ir {

inline constexpr uint64_t kDefaultFuel = 100'000'000;

using CallEdge = std::pair<std::string, std::string>;  // caller, callee

// Dynamic profile of one or more executions.
struct Trace {
  // Instructions executed in each function's own body.
  std::map<std::string, PerOpcode<uint64_t>> self_counts;
  // Instructions executed in each function and everything it called.
  std::map<std::string, PerOpcode<uint64_t>> inclusive_counts;
  std::map<std::string, uint64_t> invocations;
  // calls_ij: dynamic call counts per static call edge.
  std::map<CallEdge, uint64_t> calls;
  // Data moved per edge, summed over calls: 8 bytes per scalar argument and
  // non-void return plus every byte loaded or stored during the call.
  std::map<CallEdge, uint64_t> call_bytes;
  uint64_t total_instructions = 0;

  void Accumulate(const Trace& other);
  uint64_t Calls(const std::string& caller, const std::string& callee) const;
  uint64_t Bytes(const std::string& caller, const std::string& callee) const;
  bool operator==(const Trace&) const = default;
};

enum class TrapKind : uint8_t {
  kFuelExhausted,
  kDivisionByZero,
  kOutOfBounds,
  kBadInvocation,
};

std::string_view TrapName(TrapKind k);

class Trap : public std::runtime_error {
 public:
  Trap(TrapKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  TrapKind kind() const { return kind_; }

 private:
  TrapKind kind_;
};

struct ExecutionResult {
  // Raw 64-bit pattern: sign-extended integers, IEEE bits for f64,
  // addresses for ptr. Empty for void functions.
  std::optional<uint64_t> value;
  TypeTag type = TypeTag::kVoid;
  // The invocation's regions after execution, laid out as in the arena.
  std::vector<uint8_t> heap;
  Trace trace;
};

// Runs `entry` with the invocation's arguments and memory. Deterministic.
// Throws Trap on fuel exhaustion, division by zero, out-of-bounds access or
// an invocation that does not match the entry signature.
ExecutionResult Interpret(const Module& m, const std::string& entry,
                          const Invocation& inv, uint64_t fuel = kDefaultFuel);

// What a differential test compares: the trap kind if execution trapped,
// else the return bits and the final heap image.
struct Outcome {
  std::optional<TrapKind> trap;
  std::optional<uint64_t> value;
  std::vector<uint8_t> heap;
  bool operator==(const Outcome&) const = default;
  std::string ToString(TypeTag type) const;
};

Outcome RunForOutcome(const Module& m, const std::string& entry, const Invocation& inv,
                      uint64_t fuel = kDefaultFuel);

// Helpers for reading raw values.
double AsDouble(uint64_t bits);
int64_t AsInt(uint64_t bits);
std::string FormatValue(uint64_t bits, TypeTag type);

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_INTERPRETER_H_
