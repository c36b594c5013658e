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

#include "mergedse/ir/text.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fmt/core.h"
#include "mergedse/ir/validator.h"

namespace mergedse::ir {
namespace {

enum class Tok {
  kIdent,   // bare word: keywords, labels, types, opcodes
  kGlobal,  // @name
  kLocal,   // %name
  kBang,    // !word
  kInt,
  kFloat,
  kPunct,   // one of ( ) { } , : = and "->"
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    while (true) {
      SkipSpace();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::kEnd, "", line_, col_});
        return out;
      }
      out.push_back(Next());
    }
  }

 private:
  void SkipSpace() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else {
        return;
      }
    }
  }

  void Advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string TakeName() {
    std::string s;
    while (pos_ < src_.size() && IsNameChar(src_[pos_])) {
      s += src_[pos_];
      Advance();
    }
    return s;
  }

  Token Next() {
    int line = line_, col = col_;
    char c = src_[pos_];
    auto make = [&](Tok k, std::string t) { return Token{k, std::move(t), line, col}; };
    if (c == '@' || c == '%' || c == '!') {
      Advance();
      std::string name = TakeName();
      if (name.empty()) {
        throw IrError({{line, col, fmt::format("expected a name after '{}'", c)}});
      }
      return make(c == '@' ? Tok::kGlobal : c == '%' ? Tok::kLocal : Tok::kBang, name);
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      Advance();
      Advance();
      return make(Tok::kPunct, "->");
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      std::string s;
      s += c;
      Advance();
      bool is_float = false;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d))) {
        } else if (d == '.' || d == 'e' || d == 'E') {
          is_float = true;
        } else if ((d == '-' || d == '+') && (s.back() == 'e' || s.back() == 'E')) {
        } else {
          break;
        }
        s += d;
        Advance();
      }
      if (s == "-" || s == "+") {
        // "-inf" / "+inf"
        std::string word = TakeName();
        if (word == "inf") return make(Tok::kFloat, s + word);
        throw IrError({{line, col, fmt::format("unexpected character '{}'", c)}});
      }
      return make(is_float ? Tok::kFloat : Tok::kInt, s);
    }
    if (IsNameChar(c)) return make(Tok::kIdent, TakeName());
    if (std::string_view("(){},:=").find(c) != std::string_view::npos) {
      Advance();
      return make(Tok::kPunct, std::string(1, c));
    }
    throw IrError({{line, col, fmt::format("unexpected character '{}'", c)}});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Position {
  int line;
  int col;
};

// Source positions of parsed instructions, for mapping validator output.
using PositionTable =
    std::map<std::tuple<std::string, int, int>, Position>;

class Parser {
 public:
  Parser(std::vector<Token> toks, PositionTable* positions)
      : toks_(std::move(toks)), positions_(positions) {}

  Module Run() {
    Module m;
    std::string entry;
    while (Peek().kind != Tok::kEnd) {
      const Token& t = Peek();
      if (t.kind == Tok::kIdent && t.text == "entry") {
        Take();
        entry = Expect(Tok::kGlobal, "function name after 'entry'").text;
      } else if (t.kind == Tok::kIdent && t.text == "func") {
        Function f = ParseFunction();
        if (m.Contains(f.name)) {
          Fail(t, fmt::format("duplicate function @{}", f.name));
        }
        m.AddFunction(std::move(f));
      } else {
        Fail(t, "expected 'func' or 'entry'");
      }
    }
    if (entry.empty()) {
      if (m.Contains("main")) {
        entry = "main";
      } else if (!m.functions().empty()) {
        entry = m.functions().front().name;
      }
    }
    m.set_entry(entry);
    return m;
  }

 private:
  [[noreturn]] void Fail(const Token& t, const std::string& msg) {
    throw IrError({{t.line, t.col, msg}});
  }

  const Token& Peek(int k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& Take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool IsPunct(const std::string& p, int k = 0) const {
    return Peek(k).kind == Tok::kPunct && Peek(k).text == p;
  }
  const Token& Expect(Tok kind, const std::string& what) {
    if (Peek().kind != kind) {
      Fail(Peek(), fmt::format("expected {}, found '{}'", what, Peek().text));
    }
    return Take();
  }
  void ExpectPunct(const std::string& p) {
    if (!IsPunct(p)) {
      Fail(Peek(), fmt::format("expected '{}', found '{}'", p, Peek().text));
    }
    Take();
  }

  TypeTag ParseType(bool allow_void) {
    const Token& t = Expect(Tok::kIdent, "a type");
    auto ty = ParseTypeName(t.text);
    if (!ty || (!allow_void && *ty == TypeTag::kVoid)) {
      Fail(t, fmt::format("expected a type, found '{}'", t.text));
    }
    return *ty;
  }

  int RegisterRef(Function& f, const std::string& name) {
    if (auto r = f.FindRegister(name)) return *r;
    return f.AddRegister(name, TypeTag::kVoid);
  }

  void DefineRegister(Function& f, int reg, TypeTag type, const Token& at) {
    TypeTag& slot = f.registers[reg].type;
    if (slot == TypeTag::kVoid) {
      slot = type;
    } else if (slot != type) {
      Fail(at, fmt::format("register %{} assigned type {} but was {}",
                           f.registers[reg].name, TypeName(type), TypeName(slot)));
    }
  }

  Operand ParseOperand(Function& f) {
    const Token& t = Take();
    switch (t.kind) {
      case Tok::kLocal:
        return Operand::Reg(RegisterRef(f, t.text));
      case Tok::kInt: {
        int64_t v = 0;
        const char* b = t.text.data() + (t.text[0] == '+' ? 1 : 0);
        auto [p, ec] = std::from_chars(b, t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
          Fail(t, fmt::format("bad integer literal '{}'", t.text));
        }
        return Operand::Imm(Literal::Int(v));
      }
      case Tok::kFloat: {
        if (t.text == "-inf") return Operand::Imm(Literal::Float(-INFINITY));
        if (t.text == "+inf") return Operand::Imm(Literal::Float(INFINITY));
        double v = 0;
        const char* b = t.text.data() + (t.text[0] == '+' ? 1 : 0);
        auto [p, ec] = std::from_chars(b, t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
          Fail(t, fmt::format("bad float literal '{}'", t.text));
        }
        return Operand::Imm(Literal::Float(v));
      }
      case Tok::kIdent:
        if (t.text == "true") return Operand::Imm(Literal::Bool(true));
        if (t.text == "false") return Operand::Imm(Literal::Bool(false));
        if (t.text == "inf") return Operand::Imm(Literal::Float(INFINITY));
        if (t.text == "nan") return Operand::Imm(Literal::Float(NAN));
        break;
      default:
        break;
    }
    Fail(t, fmt::format("expected an operand, found '{}'", t.text));
  }

  struct PendingTarget {
    int block;
    int instr;
    int slot;
    Token label;
  };

  Function ParseFunction() {
    Take();  // func
    Function f;
    f.name = Expect(Tok::kGlobal, "function name").text;
    ExpectPunct("(");
    while (!IsPunct(")")) {
      const Token& p = Expect(Tok::kLocal, "parameter name");
      ExpectPunct(":");
      TypeTag ty = ParseType(false);
      if (f.FindRegister(p.text)) {
        Fail(p, fmt::format("duplicate parameter %{}", p.text));
      }
      f.params.push_back(f.AddRegister(p.text, ty));
      if (!IsPunct(")")) ExpectPunct(",");
    }
    ExpectPunct(")");
    ExpectPunct("->");
    f.return_type = ParseType(true);
    if (Peek().kind == Tok::kBang) {
      const Token& tag = Take();
      ExpectPunct("(");
      if (tag.text == "merged") {
        f.provenance = Provenance::kMerged;
        f.parents.push_back(Expect(Tok::kGlobal, "parent function").text);
        ExpectPunct(",");
        f.parents.push_back(Expect(Tok::kGlobal, "parent function").text);
      } else if (tag.text == "extracted") {
        f.provenance = Provenance::kExtractedLoop;
        f.parents.push_back(Expect(Tok::kGlobal, "source function").text);
      } else {
        Fail(tag, fmt::format("unknown function attribute !{}", tag.text));
      }
      ExpectPunct(")");
    }
    ExpectPunct("{");

    std::vector<PendingTarget> pending;
    while (!IsPunct("}")) {
      const Token& label = Expect(Tok::kIdent, "a block label");
      ExpectPunct(":");
      if (f.FindBlock(label.text)) {
        Fail(label, fmt::format("duplicate block label {}", label.text));
      }
      f.blocks.push_back({label.text, {}});
      int bi = static_cast<int>(f.blocks.size()) - 1;
      // A block runs until the next "label:" or the closing brace.
      while (!IsPunct("}") &&
             !(Peek().kind == Tok::kIdent && IsPunct(":", 1))) {
        const Token& start = Peek();
        int ii = static_cast<int>(f.blocks[bi].instrs.size());
        Instruction inst = ParseInstruction(f, bi, ii, pending);
        f.blocks[bi].instrs.push_back(std::move(inst));
        if (positions_) {
          (*positions_)[{f.name, bi, ii}] = {start.line, start.col};
        }
      }
    }
    if (f.blocks.empty()) Fail(Peek(), "function has no blocks");
    Take();  // }

    for (const auto& p : pending) {
      auto b = f.FindBlock(p.label.text);
      if (!b) Fail(p.label, fmt::format("undefined label {}", p.label.text));
      f.blocks[p.block].instrs[p.instr].targets[p.slot] = *b;
    }
    return f;
  }

  int ParseLabelRef(int block, int instr, int slot,
                    std::vector<PendingTarget>& pending) {
    const Token& t = Expect(Tok::kIdent, "a block label");
    pending.push_back({block, instr, slot, t});
    return -1;
  }

  Instruction ParseInstruction(Function& f, int bi, int ii,
                               std::vector<PendingTarget>& pending) {
    Instruction inst;
    int result = -1;
    Token result_tok{};
    if (Peek().kind == Tok::kLocal && IsPunct("=", 1)) {
      result_tok = Take();
      Take();
      result = RegisterRef(f, result_tok.text);
    }
    const Token& op_tok = Expect(Tok::kIdent, "an opcode");
    auto op = ParseOpcodeName(op_tok.text);
    if (!op) Fail(op_tok, fmt::format("unknown opcode '{}'", op_tok.text));
    inst.op = *op;

    auto operand_list = [&](int n) {
      for (int k = 0; k < n; ++k) {
        if (k > 0) ExpectPunct(",");
        inst.operands.push_back(ParseOperand(f));
      }
    };

    switch (inst.op) {
      case Opcode::kICmp:
      case Opcode::kFCmp: {
        const Token& pt = Expect(Tok::kIdent, "a comparison predicate");
        auto pred = ParsePredicateName(pt.text);
        if (!pred) Fail(pt, fmt::format("unknown predicate '{}'", pt.text));
        inst.pred = *pred;
        inst.type = ParseType(false);
        operand_list(2);
        break;
      }
      case Opcode::kSelect:
        inst.type = ParseType(false);
        operand_list(3);
        break;
      case Opcode::kZExt:
      case Opcode::kTrunc:
      case Opcode::kSIToFP:
      case Opcode::kFPToSI: {
        inst.type = ParseType(false);
        operand_list(1);
        const Token& to = Expect(Tok::kIdent, "'to'");
        if (to.text != "to") Fail(to, "expected 'to'");
        inst.cast_to = ParseType(false);
        break;
      }
      case Opcode::kLoad:
      case Opcode::kConst:
      case Opcode::kAlloca:
        inst.type = ParseType(false);
        operand_list(1);
        break;
      case Opcode::kStore:
      case Opcode::kGep:
        inst.type = ParseType(false);
        operand_list(2);
        break;
      case Opcode::kCall: {
        inst.type = ParseType(true);
        inst.callee = Expect(Tok::kGlobal, "callee").text;
        ExpectPunct("(");
        while (!IsPunct(")")) {
          inst.operands.push_back(ParseOperand(f));
          if (!IsPunct(")")) ExpectPunct(",");
        }
        ExpectPunct(")");
        break;
      }
      case Opcode::kBr:
        inst.operands.push_back(ParseOperand(f));
        ExpectPunct(",");
        inst.targets = {ParseLabelRef(bi, ii, 0, pending), -1};
        ExpectPunct(",");
        inst.targets[1] = ParseLabelRef(bi, ii, 1, pending);
        break;
      case Opcode::kJmp:
        inst.targets = {ParseLabelRef(bi, ii, 0, pending)};
        break;
      case Opcode::kRet: {
        // "ret", "ret void" or "ret <type> <value>"
        if (Peek().kind == Tok::kIdent && ParseTypeName(Peek().text)) {
          inst.type = ParseType(true);
          if (inst.type != TypeTag::kVoid) inst.operands.push_back(ParseOperand(f));
        }
        break;
      }
      default:  // binary arithmetic
        inst.type = ParseType(false);
        operand_list(2);
        break;
    }

    TypeTag rt = inst.ResultType();
    if (result >= 0) {
      if (rt == TypeTag::kVoid) {
        Fail(result_tok, fmt::format("'{}' does not produce a value", OpcodeName(inst.op)));
      }
      DefineRegister(f, result, rt, result_tok);
      inst.result = result;
    } else if (rt != TypeTag::kVoid && inst.op != Opcode::kCall) {
      Fail(op_tok, fmt::format("'{}' result must be assigned to a register",
                               OpcodeName(inst.op)));
    }
    return inst;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  PositionTable* positions_;
};

std::string OperandText(const Function& f, const Operand& o) {
  if (o.is_reg()) return "%" + f.registers[o.reg].name;
  return PrintLiteral(o.imm);
}

}  // namespace

std::string PrintLiteral(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::kBool:
      return l.int_value ? "true" : "false";
    case Literal::Kind::kInt:
      return std::to_string(l.int_value);
    case Literal::Kind::kFloat: {
      double v = l.float_value;
      if (std::isnan(v)) return "nan";
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      std::string s(buf, p);
      if (s.find_first_of(".e") == std::string::npos) s += ".0";
      return s;
    }
  }
  return "";
}

std::string PrintInstruction(const Function& f, const Instruction& inst) {
  std::string s;
  if (inst.result >= 0) s += "%" + f.registers[inst.result].name + " = ";
  s += OpcodeName(inst.op);
  auto label = [&](int b) { return f.blocks[b].label; };
  auto ops = [&](std::size_t from) {
    std::string r;
    for (std::size_t k = from; k < inst.operands.size(); ++k) {
      if (k > from) r += ", ";
      r += OperandText(f, inst.operands[k]);
    }
    return r;
  };
  switch (inst.op) {
    case Opcode::kICmp:
    case Opcode::kFCmp:
      s += fmt::format(" {} {} {}", PredicateName(inst.pred), TypeName(inst.type), ops(0));
      break;
    case Opcode::kZExt:
    case Opcode::kTrunc:
    case Opcode::kSIToFP:
    case Opcode::kFPToSI:
      s += fmt::format(" {} {} to {}", TypeName(inst.type), ops(0), TypeName(inst.cast_to));
      break;
    case Opcode::kCall:
      s += fmt::format(" {} @{}({})", TypeName(inst.type), inst.callee, ops(0));
      break;
    case Opcode::kBr:
      s += fmt::format(" {}, {}, {}", ops(0), label(inst.targets[0]), label(inst.targets[1]));
      break;
    case Opcode::kJmp:
      s += " " + label(inst.targets[0]);
      break;
    case Opcode::kRet:
      if (!inst.operands.empty()) {
        s += fmt::format(" {} {}", TypeName(inst.type), ops(0));
      }
      break;
    default:
      s += fmt::format(" {} {}", TypeName(inst.type), ops(0));
      break;
  }
  return s;
}

std::string PrintFunction(const Function& f) {
  std::string s = fmt::format("func @{}(", f.name);
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i > 0) s += ", ";
    const Register& r = f.registers[f.params[i]];
    s += fmt::format("%{}: {}", r.name, TypeName(r.type));
  }
  s += fmt::format(") -> {}", TypeName(f.return_type));
  if (f.provenance == Provenance::kMerged) {
    s += fmt::format(" !merged(@{}, @{})", f.parents.at(0), f.parents.at(1));
  } else if (f.provenance == Provenance::kExtractedLoop) {
    s += fmt::format(" !extracted(@{})", f.parents.at(0));
  }
  s += " {\n";
  for (const auto& b : f.blocks) {
    s += b.label + ":\n";
    for (const auto& inst : b.instrs) {
      s += "  " + PrintInstruction(f, inst) + "\n";
    }
  }
  s += "}\n";
  return s;
}

std::string PrintModule(const Module& m) {
  std::string s;
  if (!m.entry().empty()) s += fmt::format("entry @{}\n", m.entry());
  for (const auto& f : m.functions()) {
    s += "\n";
    s += PrintFunction(f);
  }
  return s;
}

Module ParseModuleUnchecked(std::string_view text) {
  Parser p(Lexer(text).Run(), nullptr);
  return p.Run();
}

Module ParseModule(std::string_view text) {
  PositionTable positions;
  Parser p(Lexer(text).Run(), &positions);
  Module m = p.Run();
  std::vector<Diagnostic> diags = ValidateModule(m);
  if (!diags.empty()) {
    for (auto& d : diags) {
      auto it = positions.find({d.function, d.block, d.instr});
      if (it != positions.end()) {
        d.line = it->second.line;
        d.column = it->second.col;
      }
    }
    throw IrError(std::move(diags));
  }
  return m;
}

}  // namespace mergedse::ir
