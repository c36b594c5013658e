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

#ifndef MERGEDSE_IR_VALIDATOR_H_
#define MERGEDSE_IR_VALIDATOR_H_

#include <vector>

#include "mergedse/ir/diagnostics.h"
#include "mergedse/ir/module.h"

namespace mergedse::ir {

// Checks one function against the module it lives in: operand arity and
// types, terminators, label and callee resolution, and that every register
// is assigned on every path from entry before it is read.
std::vector<Diagnostic> ValidateFunction(const Function& f, const Module& m);

// All function checks plus module-level ones: unique names, existing entry,
// no recursive call cycles.
std::vector<Diagnostic> ValidateModule(const Module& m);

// Throws IrError if ValidateModule reports anything.
void CheckModule(const Module& m);

// Registers that may be read before being assigned on some path from entry.
// Empty for a valid function.
std::vector<int> MaybeUnassignedRegisters(const Function& f);

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_VALIDATOR_H_
