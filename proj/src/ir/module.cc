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

#include "mergedse/ir/module.h"

#include <bit>
#include <stdexcept>

#include "mergedse/ir/diagnostics.h"
#include "fmt/core.h"

namespace mergedse::ir {

bool Literal::operator==(const Literal& o) const {
  return kind == o.kind && int_value == o.int_value &&
         std::bit_cast<uint64_t>(float_value) ==
             std::bit_cast<uint64_t>(o.float_value);
}

TypeTag Instruction::ResultType() const {
  switch (op) {
    case Opcode::kICmp:
    case Opcode::kFCmp:
      return TypeTag::kI1;
    case Opcode::kZExt:
    case Opcode::kTrunc:
    case Opcode::kSIToFP:
    case Opcode::kFPToSI:
      return cast_to;
    case Opcode::kGep:
    case Opcode::kAlloca:
      return TypeTag::kPtr;
    case Opcode::kStore:
    case Opcode::kBr:
    case Opcode::kJmp:
    case Opcode::kRet:
      return TypeTag::kVoid;
    default:
      return type;
  }
}

std::size_t Function::InstructionCount() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.instrs.size();
  return n;
}

std::optional<int> Function::FindRegister(const std::string& n) const {
  for (std::size_t i = 0; i < registers.size(); ++i) {
    if (registers[i].name == n) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> Function::FindBlock(const std::string& label) const {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].label == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

int Function::AddRegister(std::string n, TypeTag t) {
  registers.push_back({std::move(n), t});
  return static_cast<int>(registers.size()) - 1;
}

std::string Function::FreshRegisterName(const std::string& base) const {
  if (!FindRegister(base)) return base;
  for (int k = 1;; ++k) {
    std::string candidate = fmt::format("{}.{}", base, k);
    if (!FindRegister(candidate)) return candidate;
  }
}

std::string Function::FreshLabel(const std::string& base) const {
  if (!FindBlock(base)) return base;
  for (int k = 1;; ++k) {
    std::string candidate = fmt::format("{}.{}", base, k);
    if (!FindBlock(candidate)) return candidate;
  }
}

void Function::CanonicalizeRegisters() {
  std::vector<int> remap(registers.size(), -1);
  std::vector<Register> out;
  auto visit = [&](int& r) {
    if (r < 0) return;
    if (remap[r] < 0) {
      remap[r] = static_cast<int>(out.size());
      out.push_back(registers[r]);
    }
    r = remap[r];
  };
  for (int& p : params) visit(p);
  for (auto& b : blocks) {
    for (auto& inst : b.instrs) {
      visit(inst.result);
      for (auto& op : inst.operands) {
        if (op.is_reg()) visit(op.reg);
      }
    }
  }
  registers = std::move(out);
}

const Function* Module::Find(const std::string& n) const {
  auto it = index_.find(n);
  return it == index_.end() ? nullptr : &functions_[it->second];
}

Function* Module::FindMutable(const std::string& n) {
  auto it = index_.find(n);
  return it == index_.end() ? nullptr : &functions_[it->second];
}

std::optional<std::size_t> Module::IndexOf(const std::string& n) const {
  auto it = index_.find(n);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Module::AddFunction(Function f) {
  if (index_.count(f.name)) {
    throw IrError({{0, 0, fmt::format("duplicate function @{}", f.name)}});
  }
  index_[f.name] = functions_.size();
  functions_.push_back(std::move(f));
}

void Module::RemoveFunction(const std::string& n) {
  auto it = index_.find(n);
  if (it == index_.end()) return;
  functions_.erase(functions_.begin() + static_cast<long>(it->second));
  Reindex();
}

void Module::Reindex() {
  index_.clear();
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    index_[functions_[i].name] = i;
  }
}

}  // namespace mergedse::ir
