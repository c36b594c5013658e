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

// Textual mini-IR. Grammar (whitespace-insensitive, ';' starts a comment):
//
//   module   := ('entry' '@'name | function)*
//   function := 'func' '@'name '(' [param (',' param)*] ')' '->' type
//               [origin] '{' block+ '}'
//   param    := '%'name ':' type
//   origin   := '!merged' '(' '@'name ',' '@'name ')'
//             | '!extracted' '(' '@'name ')'
//   block    := label ':' instr*
//
// See docs/ir.md for the instruction forms.

#ifndef MERGEDSE_IR_TEXT_H_
#define MERGEDSE_IR_TEXT_H_

#include <string>
#include <string_view>

#include "mergedse/ir/diagnostics.h"
#include "mergedse/ir/module.h"

namespace mergedse::ir {

// Parses and validates. Throws IrError carrying positioned diagnostics.
Module ParseModule(std::string_view text);

// Parses without running the validator (syntax and register typing only).
Module ParseModuleUnchecked(std::string_view text);

std::string PrintModule(const Module& m);
std::string PrintFunction(const Function& f);
std::string PrintInstruction(const Function& f, const Instruction& inst);
std::string PrintLiteral(const Literal& l);

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_TEXT_H_
