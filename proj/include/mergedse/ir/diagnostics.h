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

#ifndef MERGEDSE_IR_DIAGNOSTICS_H_
#define MERGEDSE_IR_DIAGNOSTICS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace mergedse::ir {

// line/column are 1-based; 0 means "no source position" (e.g. a module
// built in memory).
struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
  // In-memory location, filled by the validator: function name, block and
  // instruction index (-1 when not applicable).
  std::string function;
  int block = -1;
  int instr = -1;

  std::string ToString() const;
};

// Raised for malformed text and for modules that fail validation.
class IrError : public std::runtime_error {
 public:
  explicit IrError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_DIAGNOSTICS_H_
