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

#ifndef MERGEDSE_TESTS_TEST_UTIL_H_
#define MERGEDSE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mergedse/ir/heap.h"
#include "mergedse/ir/text.h"

namespace mergedse::testing {

inline std::string ReadCorpusFile(const std::string& name) {
  std::ifstream in(std::filesystem::path(MERGEDSE_CORPUS_DIR) / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ir::Module LoadCorpusModule(const std::string& name) {
  return ir::ParseModule(ReadCorpusFile(name));
}

inline std::vector<ir::Invocation> LoadCorpusInputs(const std::string& name) {
  return ir::ParseHeapFile(ReadCorpusFile(name));
}

// Program names (without extension) of every corpus .ir file, sorted.
inline std::vector<std::string> CorpusPrograms() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(MERGEDSE_CORPUS_DIR)) {
    if (e.path().extension() == ".ir") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ir::Invocation Args(std::initializer_list<ir::Literal> lits) {
  ir::Invocation inv;
  for (const auto& l : lits) inv.args.push_back(ir::ArgSpec::Lit(l));
  return inv;
}

// Collapses runs of whitespace to one space.
inline std::string Squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      out += c;
      space = false;
    }
  }
  return out;
}

}  // namespace mergedse::testing

#endif  // MERGEDSE_TESTS_TEST_UTIL_H_
