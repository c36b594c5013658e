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

#include "mergedse/ir/diagnostics.h"

#include "fmt/core.h"

namespace mergedse::ir {

std::string Diagnostic::ToString() const {
  if (line == 0) {
    return function.empty() ? message : fmt::format("@{}: {}", function, message);
  }
  return fmt::format("{}:{}: {}", line, column, message);
}

namespace {

std::string Join(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.ToString();
  }
  return out;
}

}  // namespace

IrError::IrError(std::vector<Diagnostic> diags)
    : std::runtime_error(Join(diags)), diags_(std::move(diags)) {}

}  // namespace mergedse::ir
