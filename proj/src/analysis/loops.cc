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

#include "mergedse/analysis/loops.h"

#include <algorithm>
#include <functional>

namespace mergedse::analysis {

std::vector<std::vector<int>> Successors(const ir::Function& f) {
  std::vector<std::vector<int>> succ(f.blocks.size());
  for (std::size_t b = 0; b < f.blocks.size(); ++b) {
    if (f.blocks[b].instrs.empty()) continue;
    for (int t : f.blocks[b].instrs.back().targets) {
      if (std::find(succ[b].begin(), succ[b].end(), t) == succ[b].end()) succ[b].push_back(t);
    }
  }
  return succ;
}

std::vector<std::vector<int>> Predecessors(const ir::Function& f) {
  auto succ = Successors(f);
  std::vector<std::vector<int>> pred(f.blocks.size());
  for (std::size_t b = 0; b < succ.size(); ++b) {
    for (int t : succ[b]) pred[t].push_back(static_cast<int>(b));
  }
  return pred;
}

namespace {

std::vector<int> ReversePostOrder(const std::vector<std::vector<int>>& succ) {
  std::vector<int> post;
  std::vector<char> seen(succ.size(), 0);
  // Iterative DFS; each frame remembers the next successor to try.
  std::vector<std::pair<int, std::size_t>> stack;
  if (succ.empty()) return post;
  stack.push_back({0, 0});
  seen[0] = 1;
  while (!stack.empty()) {
    auto& [b, next] = stack.back();
    if (next < succ[b].size()) {
      int t = succ[b][next++];
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back({t, 0});
      }
    } else {
      post.push_back(b);
      stack.pop_back();
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

}  // namespace

// Cooper, Harvey and Kennedy's iterative scheme over reverse post-order.
std::vector<int> ImmediateDominators(const ir::Function& f) {
  auto succ = Successors(f);
  auto pred = Predecessors(f);
  auto rpo = ReversePostOrder(succ);
  std::vector<int> order(f.blocks.size(), -1);
  for (std::size_t k = 0; k < rpo.size(); ++k) order[rpo[k]] = static_cast<int>(k);
  std::vector<int> idom(f.blocks.size(), -1);
  if (f.blocks.empty()) return idom;
  idom[0] = 0;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (order[a] > order[b]) a = idom[a];
      while (order[b] > order[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 1; k < rpo.size(); ++k) {
      int b = rpo[k];
      int new_idom = -1;
      for (int p : pred[b]) {
        if (idom[p] < 0) continue;
        new_idom = new_idom < 0 ? p : intersect(p, new_idom);
      }
      if (new_idom != idom[b]) {
        idom[b] = new_idom;
        changed = true;
      }
    }
  }
  return idom;
}

bool Dominates(const std::vector<int>& idom, int a, int b) {
  if (idom[b] < 0) return false;
  while (true) {
    if (a == b) return true;
    if (b == 0) return false;
    b = idom[b];
  }
}

LoopForest NaturalLoops(const ir::Function& f) {
  LoopForest forest;
  const int n = static_cast<int>(f.blocks.size());
  if (n == 0) return forest;
  auto succ = Successors(f);
  auto pred = Predecessors(f);
  auto idom = ImmediateDominators(f);

  // Retreating edges found by DFS: back edges when the target dominates the
  // source, otherwise evidence of irreducibility.
  std::map<int, std::vector<int>> latches;  // header -> back-edge sources
  std::vector<char> state(n, 0);            // 0 new, 1 on stack, 2 done
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  state[0] = 1;
  while (!stack.empty()) {
    auto& [b, next] = stack.back();
    if (next < succ[b].size()) {
      int t = succ[b][next++];
      if (state[t] == 0) {
        state[t] = 1;
        stack.push_back({t, 0});
      } else if (state[t] == 1) {
        if (Dominates(idom, t, b)) {
          latches[t].push_back(b);
        } else {
          forest.irreducible = true;
        }
      }
    } else {
      state[b] = 2;
      stack.pop_back();
    }
  }

  std::vector<Loop> found;
  for (auto& [header, sources] : latches) {
    Loop l;
    l.header = header;
    l.blocks.insert(header);
    std::vector<int> work;
    for (int s : sources) {
      if (l.blocks.insert(s).second) work.push_back(s);
    }
    while (!work.empty()) {
      int b = work.back();
      work.pop_back();
      for (int p : pred[b]) {
        if (idom[p] < 0) continue;  // unreachable
        if (l.blocks.insert(p).second) work.push_back(p);
      }
    }
    found.push_back(std::move(l));
  }

  // Parent = the smallest other loop containing this one's header.
  std::vector<int> parent(found.size(), -1);
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (i == j || !found[j].blocks.count(found[i].header)) continue;
      if (found[j].blocks.size() <= found[i].blocks.size()) continue;
      if (parent[i] < 0 || found[j].blocks.size() < found[parent[i]].blocks.size()) {
        parent[i] = static_cast<int>(j);
      }
    }
  }
  // Pre-order emission; latches (and so found) are sorted by header.
  std::function<void(int, int, int)> emit = [&](int idx, int out_parent, int depth) {
    Loop l = found[idx];
    l.parent = out_parent;
    l.depth = depth;
    int me = static_cast<int>(forest.loops.size());
    forest.loops.push_back(std::move(l));
    for (std::size_t c = 0; c < found.size(); ++c) {
      if (parent[c] == idx) emit(static_cast<int>(c), me, depth + 1);
    }
  };
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (parent[i] < 0) emit(static_cast<int>(i), -1, 1);
  }
  return forest;
}

std::vector<std::set<int>> LiveIn(const ir::Function& f) {
  const std::size_t n = f.blocks.size();
  std::vector<std::set<int>> use(n), def(n), live(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (const auto& inst : f.blocks[b].instrs) {
      for (const auto& op : inst.operands) {
        if (op.is_reg() && !def[b].count(op.reg)) use[b].insert(op.reg);
      }
      if (inst.result >= 0) def[b].insert(inst.result);
    }
  }
  auto succ = Successors(f);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = n; k-- > 0;) {
      std::set<int> in = use[k];
      for (int s : succ[k]) {
        for (int r : live[s]) {
          if (!def[k].count(r)) in.insert(r);
        }
      }
      if (in != live[k]) {
        live[k] = std::move(in);
        changed = true;
      }
    }
  }
  return live;
}

}  // namespace mergedse::analysis
