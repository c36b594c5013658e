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

// The mini-IR: a register-based, non-SSA representation. Registers may be
// reassigned; there are no phi nodes. Every function's entry block is
// blocks[0].

#ifndef MERGEDSE_IR_MODULE_H_
#define MERGEDSE_IR_MODULE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mergedse/ir/types.h"

namespace mergedse::ir {

// An untyped literal; its type comes from the operand position.
struct Literal {
  enum class Kind : uint8_t { kInt, kFloat, kBool };
  Kind kind = Kind::kInt;
  int64_t int_value = 0;
  double float_value = 0.0;

  static Literal Int(int64_t v) { return {Kind::kInt, v, 0.0}; }
  static Literal Float(double v) { return {Kind::kFloat, 0, v}; }
  static Literal Bool(bool v) { return {Kind::kBool, v ? 1 : 0, 0.0}; }

  // Bitwise comparison so NaN literals compare equal to themselves.
  bool operator==(const Literal& o) const;
};

struct Operand {
  enum class Kind : uint8_t { kReg, kImm };
  Kind kind = Kind::kReg;
  int reg = -1;  // index into Function::registers
  Literal imm;

  static Operand Reg(int r) { return {Kind::kReg, r, {}}; }
  static Operand Imm(Literal l) { return {Kind::kImm, -1, l}; }
  bool is_reg() const { return kind == Kind::kReg; }
  bool operator==(const Operand& o) const {
    if (kind != o.kind) return false;
    return is_reg() ? reg == o.reg : imm == o.imm;
  }
};

struct Instruction {
  Opcode op = Opcode::kConst;
  Predicate pred = Predicate::kNone;
  // Result/value type for most opcodes; operand type for compares; source
  // type for casts; stored type for store; return type for call and ret.
  TypeTag type = TypeTag::kVoid;
  TypeTag cast_to = TypeTag::kVoid;  // casts only
  int result = -1;                   // register index, -1 when none
  std::vector<Operand> operands;
  std::vector<int> targets;  // block indices: br {true, false}, jmp {dest}
  std::string callee;        // call only

  bool operator==(const Instruction&) const = default;

  // The type of the value written to `result`.
  TypeTag ResultType() const;
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instrs;
  bool operator==(const BasicBlock&) const = default;
};

struct Register {
  std::string name;  // without the leading '%'
  TypeTag type = TypeTag::kVoid;
  bool operator==(const Register&) const = default;
};

enum class Provenance : uint8_t { kOriginal, kExtractedLoop, kMerged };

struct Function {
  std::string name;  // without the leading '@'
  std::vector<int> params;  // register indices in declaration order
  TypeTag return_type = TypeTag::kVoid;
  std::vector<Register> registers;
  std::vector<BasicBlock> blocks;  // blocks[0] is the entry
  Provenance provenance = Provenance::kOriginal;
  // kMerged: the two merge parents (first parent is selected by f_sel=1).
  // kExtractedLoop: the function the loop was extracted from.
  std::vector<std::string> parents;

  bool operator==(const Function&) const = default;

  std::size_t InstructionCount() const;
  TypeTag ParamType(std::size_t i) const { return registers[params[i]].type; }
  std::optional<int> FindRegister(const std::string& name) const;
  std::optional<int> FindBlock(const std::string& label) const;
  int AddRegister(std::string name, TypeTag type);
  // Returns a register name not yet used in this function, derived from
  // `base`.
  std::string FreshRegisterName(const std::string& base) const;
  std::string FreshLabel(const std::string& base) const;
  // Renumbers registers in order of first textual appearance (parameters,
  // then each instruction's result before its operands) and drops unused
  // ones, so an in-memory function compares equal to its parsed print.
  void CanonicalizeRegisters();
};

class Module {
 public:
  Module() = default;

  const std::vector<Function>& functions() const { return functions_; }
  std::vector<Function>& mutable_functions() { return functions_; }

  const Function* Find(const std::string& name) const;
  Function* FindMutable(const std::string& name);
  std::optional<std::size_t> IndexOf(const std::string& name) const;
  bool Contains(const std::string& name) const { return IndexOf(name).has_value(); }

  // Appends a function; its name must be unused.
  void AddFunction(Function f);
  void RemoveFunction(const std::string& name);

  const std::string& entry() const { return entry_; }
  void set_entry(std::string name) { entry_ = std::move(name); }

  bool operator==(const Module& o) const {
    return functions_ == o.functions_ && entry_ == o.entry_;
  }

 private:
  void Reindex();

  std::vector<Function> functions_;
  std::map<std::string, std::size_t> index_;
  std::string entry_;
};

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_MODULE_H_
