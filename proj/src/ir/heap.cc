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

#include "mergedse/ir/heap.h"

#include <charconv>
#include <sstream>

#include "fmt/core.h"
#include "mergedse/ir/diagnostics.h"
#include "mergedse/ir/text.h"

namespace mergedse::ir {
namespace {

std::vector<std::string> Words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Literal ParseArgLiteral(const std::string& w, int line) {
  if (w == "true") return Literal::Bool(true);
  if (w == "false") return Literal::Bool(false);
  const char* end = w.data() + w.size();
  if (w.find_first_of(".eE") == std::string::npos) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(w.data(), end, v);
    if (ec == std::errc() && p == end) return Literal::Int(v);
  } else {
    double v = 0;
    auto [p, ec] = std::from_chars(w.data(), end, v);
    if (ec == std::errc() && p == end) return Literal::Float(v);
  }
  throw IrError({{line, 1, fmt::format("bad argument literal '{}'", w)}});
}

}  // namespace

std::vector<Invocation> ParseHeapFile(std::string_view text) {
  std::vector<Invocation> out(1);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> void { throw IrError({{line_no, 1, msg}}); };
  while (std::getline(in, raw)) {
    ++line_no;
    auto cut = raw.find_first_of("#;");
    if (cut != std::string::npos) raw.resize(cut);
    auto w = Words(raw);
    if (w.empty()) continue;
    Invocation& cur = out.back();
    if (w[0] == "---") {
      out.emplace_back();
    } else if (w[0] == "region") {
      if (w.size() < 3 || w.size() > 4) fail("expected 'region <name> <byte-length> [hex]'");
      for (const auto& r : cur.regions) {
        if (r.name == w[1]) fail(fmt::format("duplicate region '{}'", w[1]));
      }
      uint64_t len = 0;
      auto [p, ec] = std::from_chars(w[2].data(), w[2].data() + w[2].size(), len);
      if (ec != std::errc() || p != w[2].data() + w[2].size()) fail("bad region length");
      Region r{w[1], std::vector<uint8_t>(len, 0)};
      if (w.size() == 4) {
        const std::string& hex = w[3];
        if (hex.size() % 2 != 0 || hex.size() / 2 > len) fail("hex bytes exceed region length");
        for (std::size_t k = 0; k < hex.size(); k += 2) {
          int hi = HexDigit(hex[k]), lo = HexDigit(hex[k + 1]);
          if (hi < 0 || lo < 0) fail("bad hex digit");
          r.bytes[k / 2] = static_cast<uint8_t>(hi * 16 + lo);
        }
      }
      cur.regions.push_back(std::move(r));
    } else if (w[0] == "arg") {
      if (w.size() != 4 || w[2] != "=") fail("expected 'arg <index> = <value>'");
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(w[1].data(), w[1].data() + w[1].size(), idx);
      if (ec != std::errc() || p != w[1].data() + w[1].size()) fail("bad argument index");
      if (cur.args.size() <= idx) cur.args.resize(idx + 1);
      bool is_region = false;
      for (const auto& r : cur.regions) is_region |= r.name == w[3];
      cur.args[idx] = is_region ? ArgSpec::Ref(w[3]) : ArgSpec::Lit(ParseArgLiteral(w[3], line_no));
    } else {
      fail(fmt::format("unknown directive '{}'", w[0]));
    }
  }
  if (out.size() > 1 && out.back().regions.empty() && out.back().args.empty()) out.pop_back();
  return out;
}

std::string PrintHeapFile(const std::vector<Invocation>& invocations) {
  std::string s;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    if (i > 0) s += "---\n";
    for (const auto& r : invocations[i].regions) {
      s += fmt::format("region {} {}", r.name, r.bytes.size());
      std::size_t last = r.bytes.size();
      while (last > 0 && r.bytes[last - 1] == 0) --last;
      if (last > 0) {
        s += " ";
        for (std::size_t k = 0; k < last; ++k) s += fmt::format("{:02x}", r.bytes[k]);
      }
      s += "\n";
    }
    for (std::size_t k = 0; k < invocations[i].args.size(); ++k) {
      const ArgSpec& a = invocations[i].args[k];
      s += fmt::format("arg {} = {}\n", k,
                       a.kind == ArgSpec::Kind::kRegion ? a.region : PrintLiteral(a.literal));
    }
  }
  return s;
}

}  // namespace mergedse::ir
