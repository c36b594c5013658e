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

#include "mergedse/partition/partition.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "fmt/core.h"
#include "mergedse/analysis/call_graph.h"

namespace mergedse::partition {
namespace {

constexpr int64_t kMaxBudget = std::numeric_limits<int64_t>::max() / 4;

// Domain bits for the search.
constexpr uint8_t kSw = 1, kHw = 2, kNo = 4;

std::vector<int> Group(const PartitionProblem& p, int r) {
  std::vector<int> g{r};
  g.insert(g.end(), p.descend[r].begin(), p.descend[r].end());
  return g;
}

}  // namespace

int64_t ToPicoseconds(double seconds) {
  if (!(seconds >= 0)) throw PartitionError(fmt::format("negative or NaN time {}", seconds));
  double ps = std::round(seconds * 1e12);
  if (ps > static_cast<double>(kMaxBudget)) throw PartitionError("time out of range");
  return static_cast<int64_t>(ps);
}

double ToSeconds(int64_t ps) { return static_cast<double>(ps) * 1e-12; }

int PartitionProblem::Find(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void PartitionProblem::Finalize() {
  const int n = static_cast<int>(nodes.size());
  auto valid = [&](int i) { return i >= 0 && i < n; };
  if (area_budget < 0) throw PartitionError("negative area budget");
  if (entry != -1 && (!valid(entry) || nodes[entry].merged)) {
    throw PartitionError("entry must be an unmerged function");
  }
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i) {
    const Node& v = nodes[i];
    if (v.sw_ps < 0 || v.hw_ps < 0 || v.area < 0) {
      throw PartitionError(fmt::format("negative cost on @{}", v.name));
    }
    if (v.merged != (v.parents.size() == 2)) {
      throw PartitionError(fmt::format("@{}: merged functions have exactly two parents", v.name));
    }
    for (int q : v.parents) {
      if (!valid(q) || q == i) throw PartitionError(fmt::format("@{}: bad parent", v.name));
      children[q].push_back(i);
    }
    for (int c : v.callees) {
      if (!valid(c) || c == i) throw PartitionError(fmt::format("@{}: bad callee", v.name));
    }
  }
  // Call graph acyclic: C_i is closed, so a cycle shows up as i in C_j and
  // j in C_i; check with a DFS anyway in case C_i is not closed.
  std::vector<int> state(n, 0);
  std::function<void(int)> visit = [&](int i) {
    state[i] = 1;
    for (int c : nodes[i].callees) {
      if (state[c] == 1) throw PartitionError("call graph has a cycle through @" + nodes[c].name);
      if (state[c] == 0) visit(c);
    }
    state[i] = 2;
  };
  for (int i = 0; i < n; ++i) {
    if (state[i] == 0) visit(i);
  }
  descend.assign(n, {});
  state.assign(n, 0);
  std::function<void(int)> collect = [&](int i) {
    state[i] = 1;
    std::set<int> d;
    for (int c : children[i]) {
      if (state[c] == 1) throw PartitionError("merge graph has a cycle through @" + nodes[c].name);
      if (state[c] == 0) collect(c);
      d.insert(c);
      d.insert(descend[c].begin(), descend[c].end());
    }
    descend[i].assign(d.begin(), d.end());
    state[i] = 2;
  };
  for (int i = 0; i < n; ++i) {
    if (state[i] == 0) collect(i);
  }
  root.assign(n, false);
  root_ancestors.assign(n, {});
  for (int i = 0; i < n; ++i) root[i] = !nodes[i].merged;
  for (int r = 0; r < n; ++r) {
    if (!root[r]) continue;
    for (int k : descend[r]) root_ancestors[k].push_back(r);
  }
  for (const Edge& e : edges) {
    if (!valid(e.caller) || !valid(e.callee) || e.caller == e.callee || e.cost_ps < 0) {
      throw PartitionError("bad frontier edge");
    }
  }
}

void PartitionProblem::ApplyInterconnect(const Interconnect& ic) {
  if (ic.latency_cycles < 0 || !(ic.bandwidth_bps > 0) || ic.clock_seconds < 0) {
    throw PartitionError("interconnect parameters must be non-negative, bandwidth positive");
  }
  for (Edge& e : edges) {
    double s = static_cast<double>(e.calls) * ic.latency_cycles * ic.clock_seconds;
    if (!std::isinf(ic.bandwidth_bps)) s += static_cast<double>(e.bytes) / ic.bandwidth_bps;
    e.cost_ps = ToPicoseconds(s);
  }
}

PartitionProblem BuildProblem(const ir::Module& m,
                              const std::map<std::string, FunctionCost>& costs,
                              const ir::Trace& trace, const Interconnect& ic,
                              double area_budget) {
  PartitionProblem p;
  auto cg = analysis::BuildCallGraph(m);
  std::map<std::string, int> index;
  for (const auto& f : m.functions()) index[f.name] = static_cast<int>(index.size());
  for (const auto& f : m.functions()) {
    auto it = costs.find(f.name);
    if (it == costs.end()) throw PartitionError("no cost estimate for @" + f.name);
    PartitionProblem::Node v;
    v.name = f.name;
    v.sw_ps = ToPicoseconds(it->second.sw_seconds);
    v.hw_ps = ToPicoseconds(it->second.hw_seconds);
    if (!(it->second.area_luts >= 0)) throw PartitionError("negative area for @" + f.name);
    v.area = static_cast<int64_t>(std::ceil(it->second.area_luts));
    v.merged = f.provenance == ir::Provenance::kMerged;
    if (v.merged) {
      for (const auto& parent : f.parents) {
        auto pi = index.find(parent);
        if (pi == index.end()) throw PartitionError("merge parent @" + parent + " not in module");
        v.parents.push_back(pi->second);
      }
    }
    for (const auto& c : cg.TransitiveCallees(f.name)) v.callees.push_back(index.at(c));
    p.nodes.push_back(std::move(v));
  }
  if (!m.entry().empty() && index.count(m.entry())) p.entry = index.at(m.entry());
  p.area_budget = area_budget >= static_cast<double>(kMaxBudget)
                      ? kMaxBudget
                      : static_cast<int64_t>(std::floor(std::max(0.0, area_budget)));
  p.Finalize();

  std::map<std::pair<int, int>, PartitionProblem::Edge> edges;
  for (const auto& [edge, calls] : trace.calls) {
    auto ci = index.find(edge.first), ce = index.find(edge.second);
    if (ci == index.end() || ce == index.end()) {
      throw PartitionError(fmt::format("profile edge @{} -> @{} not in module", edge.first,
                                       edge.second));
    }
    uint64_t bytes = trace.Bytes(edge.first, edge.second);
    std::vector<int> targets{ce->second};
    targets.insert(targets.end(), p.descend[ce->second].begin(), p.descend[ce->second].end());
    for (int t : targets) {
      auto& e = edges[{ci->second, t}];
      e.caller = ci->second;
      e.callee = t;
      e.calls += calls;
      e.bytes += bytes;
    }
  }
  for (auto& [key, e] : edges) p.edges.push_back(e);
  p.ApplyInterconnect(ic);
  return p;
}

std::vector<std::string> PartitionSolution::Software(const PartitionProblem& p) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    if (placement[i] == Placement::kSoftware) out.push_back(p.nodes[i].name);
  }
  return out;
}

std::vector<std::string> PartitionSolution::HardwareOriginal(const PartitionProblem& p) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    if (placement[i] == Placement::kHardware && !p.nodes[i].merged) out.push_back(p.nodes[i].name);
  }
  return out;
}

std::vector<std::string> PartitionSolution::HardwareMerged(const PartitionProblem& p) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    if (placement[i] == Placement::kHardware && p.nodes[i].merged) out.push_back(p.nodes[i].name);
  }
  return out;
}

PartitionSolution Evaluate(const PartitionProblem& p, std::vector<Placement> placement) {
  PartitionSolution s;
  s.placement = std::move(placement);
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (s.placement[i] == Placement::kSoftware) s.software_ps += p.nodes[i].sw_ps;
    if (s.placement[i] == Placement::kHardware) {
      s.hardware_ps += p.nodes[i].hw_ps;
      s.area_used += p.nodes[i].area;
    }
  }
  s.frontier.resize(p.edges.size());
  for (std::size_t e = 0; e < p.edges.size(); ++e) {
    const auto& edge = p.edges[e];
    s.frontier[e] = s.placement[edge.caller] == Placement::kSoftware &&
                    s.placement[edge.callee] == Placement::kHardware;
    if (s.frontier[e]) s.communication_ps += edge.cost_ps;
  }
  s.objective_ps = s.software_ps + s.hardware_ps + s.communication_ps;
  return s;
}

std::vector<std::string> CheckSolution(const PartitionProblem& p, const PartitionSolution& s) {
  std::vector<std::string> out;
  const int n = static_cast<int>(p.nodes.size());
  if (static_cast<int>(s.placement.size()) != n || s.frontier.size() != p.edges.size()) {
    return {"shape: placement or frontier size does not match the problem"};
  }
  auto on = [&](int i) { return s.placement[i] != Placement::kNone; };
  auto hw = [&](int i) { return s.placement[i] == Placement::kHardware; };
  auto sw = [&](int i) { return s.placement[i] == Placement::kSoftware; };
  int64_t area = 0;
  for (int i = 0; i < n; ++i) {
    if (hw(i)) area += p.nodes[i].area;
    if (sw(i) && p.nodes[i].merged) out.push_back("merged-in-software[@" + p.nodes[i].name + "]");
  }
  if (p.entry >= 0 && !sw(p.entry)) out.push_back("entry-in-software[@" + p.nodes[p.entry].name + "]");
  if (area > p.area_budget) {
    out.push_back(fmt::format("area-budget: {} LUTs used, {} allowed", area, p.area_budget));
  }
  for (int r = 0; r < n; ++r) {
    if (!p.root[r]) continue;
    int count = 0;
    for (int g : Group(p, r)) count += on(g);
    if (count != 1) {
      out.push_back(fmt::format("root-coverage[@{}]: realized {} times", p.nodes[r].name, count));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!hw(i)) continue;
    for (int j : p.nodes[i].callees) {
      if (!p.root[j]) continue;
      bool covered = false;
      for (int g : Group(p, j)) covered |= hw(g);
      if (!covered) {
        out.push_back(fmt::format("callee-in-hardware[@{} -> @{}]", p.nodes[i].name,
                                  p.nodes[j].name));
      }
    }
  }
  int64_t comm = 0;
  for (std::size_t e = 0; e < p.edges.size(); ++e) {
    const auto& edge = p.edges[e];
    if (sw(edge.caller) && hw(edge.callee) && !s.frontier[e]) {
      out.push_back(fmt::format("frontier[@{} -> @{}]", p.nodes[edge.caller].name,
                                p.nodes[edge.callee].name));
    }
    if (s.frontier[e]) comm += edge.cost_ps;
  }
  int64_t total = comm;
  for (int i = 0; i < n; ++i) {
    if (sw(i)) total += p.nodes[i].sw_ps;
    if (hw(i)) total += p.nodes[i].hw_ps;
  }
  if (total != s.objective_ps) {
    out.push_back(fmt::format("objective: reported {} ps, placement costs {} ps", s.objective_ps,
                              total));
  }
  return out;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const PartitionProblem& p, const SolveOptions& opts) : p_(p), opts_(opts) {
    const int n = static_cast<int>(p.nodes.size());
    for (int r = 0; r < n; ++r) {
      if (p.root[r]) groups_.push_back(Group(p, r));
    }
    for (int i = 0; i < n; ++i) {
      for (int j : p.nodes[i].callees) {
        if (p.root[j]) implications_.push_back({i, Group(p, j)});
      }
    }
    auto savings = [&](int i) {
      int64_t sw = p.nodes[i].sw_ps;
      if (p.nodes[i].merged) {
        sw = 0;
        for (int r : p.root_ancestors[i]) sw += p.nodes[r].sw_ps;
      }
      return sw - p.nodes[i].hw_ps;
    };
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return savings(a) > savings(b); });
  }

  PartitionSolution Run() {
    const int n = static_cast<int>(p_.nodes.size());
    // Incumbent: every Root in software.
    std::vector<Placement> all_sw(n, Placement::kNone);
    for (int i = 0; i < n; ++i) {
      if (p_.root[i]) all_sw[i] = Placement::kSoftware;
    }
    best_ = Evaluate(p_, all_sw);
    std::vector<uint8_t> dom(n);
    for (int i = 0; i < n; ++i) {
      if (p_.nodes[i].merged) {
        dom[i] = kHw | kNo;
      } else if (i == p_.entry) {
        dom[i] = kSw;
      } else {
        dom[i] = kSw | kHw | (p_.descend[i].empty() ? 0 : kNo);
      }
    }
    Search(std::move(dom));
    best_.optimal = !aborted_;
    best_.nodes_explored = nodes_;
    return best_;
  }

 private:
  static bool Fixed(uint8_t d) { return std::popcount(d) == 1; }
  // Realized (software or hardware) in every completion.
  static bool SurelyOn(uint8_t d) { return (d & kNo) == 0; }

  // Restricts dom[i] to mask; false when that empties it.
  static bool Restrict(std::vector<uint8_t>& dom, int i, uint8_t mask, bool* changed) {
    uint8_t next = dom[i] & mask;
    if (next == dom[i]) return true;
    dom[i] = next;
    *changed = true;
    return next != 0;
  }

  bool Propagate(std::vector<uint8_t>& dom) const {
    bool changed = true;
    while (changed) {
      changed = false;
      // Each Root realized exactly once among itself and its descendants.
      for (const auto& g : groups_) {
        int sure = -1, possible = 0, last_possible = -1;
        for (int v : g) {
          if (SurelyOn(dom[v])) {
            if (sure >= 0) return false;
            sure = v;
          }
          if (dom[v] & (kSw | kHw)) {
            ++possible;
            last_possible = v;
          }
        }
        if (possible == 0) return false;
        if (sure >= 0) {
          for (int v : g) {
            if (v != sure && !Restrict(dom, v, kNo, &changed)) return false;
          }
        } else if (possible == 1 && !Restrict(dom, last_possible, kSw | kHw, &changed)) {
          return false;
        }
      }
      // A hardware caller needs each Root callee covered in hardware.
      for (const auto& [caller, g] : implications_) {
        int can = 0, last = -1;
        for (int v : g) {
          if (dom[v] & kHw) {
            ++can;
            last = v;
          }
        }
        if (can == 0) {
          if (!Restrict(dom, caller, static_cast<uint8_t>(~kHw), &changed)) return false;
        } else if (dom[caller] == kHw && can == 1) {
          if (!Restrict(dom, last, kHw, &changed)) return false;
        }
      }
      int64_t used = 0;
      for (std::size_t i = 0; i < dom.size(); ++i) {
        if (dom[i] == kHw) used += p_.nodes[i].area;
      }
      if (used > p_.area_budget) return false;
      for (std::size_t i = 0; i < dom.size(); ++i) {
        if (dom[i] != kHw && (dom[i] & kHw) && used + p_.nodes[i].area > p_.area_budget) {
          if (!Restrict(dom, static_cast<int>(i), static_cast<uint8_t>(~kHw), &changed)) {
            return false;
          }
        }
      }
    }
    return true;
  }

  // Committed cost plus, for every Root not yet settled, its cheapest
  // realization under a fractional multiple-choice knapsack relaxation of
  // the area budget. Frontier costs of undecided edges are dropped.
  double LowerBound(const std::vector<uint8_t>& dom) const {
    double committed = 0;
    int64_t used = 0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (dom[i] == kSw) committed += p_.nodes[i].sw_ps;
      if (dom[i] == kHw) {
        committed += p_.nodes[i].hw_ps;
        used += p_.nodes[i].area;
      }
    }
    for (const auto& e : p_.edges) {
      if (dom[e.caller] == kSw && dom[e.callee] == kHw) committed += e.cost_ps;
    }
    struct Segment {
      double area, savings;
    };
    std::vector<Segment> segments;
    double base = 0, free_savings = 0;
    for (const auto& g : groups_) {
      bool settled = false;
      for (int v : g) settled |= dom[v] == kSw || dom[v] == kHw;
      if (settled) continue;
      const int r = g.front();
      // (area, cost) of each way to realize r.
      std::vector<std::pair<double, double>> options;
      if (dom[r] & kSw) options.push_back({0, static_cast<double>(p_.nodes[r].sw_ps)});
      if (dom[r] & kHw) {
        options.push_back({static_cast<double>(p_.nodes[r].area),
                           static_cast<double>(p_.nodes[r].hw_ps)});
      }
      for (std::size_t k = 1; k < g.size(); ++k) {
        int v = g[k];
        if (!(dom[v] & kHw)) continue;
        double share = static_cast<double>(p_.root_ancestors[v].size());
        options.push_back({p_.nodes[v].area / share, p_.nodes[v].hw_ps / share});
      }
      if (!(dom[r] & kSw)) {
        double cheapest = INFINITY;
        for (const auto& o : options) cheapest = std::min(cheapest, o.second);
        base += cheapest;
        continue;
      }
      const double sw = static_cast<double>(p_.nodes[r].sw_ps);
      base += sw;
      std::vector<std::pair<double, double>> pts;  // (area, savings)
      double zero_area = 0;
      for (const auto& [a, c] : options) {
        if (c >= sw) continue;
        if (a == 0) {
          zero_area = std::max(zero_area, sw - c);
        } else {
          pts.push_back({a, sw - c});
        }
      }
      free_savings += zero_area;
      std::sort(pts.begin(), pts.end());
      std::vector<std::pair<double, double>> hull{{0, zero_area}};
      auto slope = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
        return (b.second - a.second) / (b.first - a.first);
      };
      for (const auto& pt : pts) {
        if (pt.second <= hull.back().second) continue;
        if (pt.first == hull.back().first) hull.pop_back();
        while (hull.size() >= 2 && slope(hull[hull.size() - 2], hull.back()) <= slope(hull.back(), pt)) {
          hull.pop_back();
        }
        hull.push_back(pt);
      }
      for (std::size_t k = 1; k < hull.size(); ++k) {
        segments.push_back({hull[k].first - hull[k - 1].first, hull[k].second - hull[k - 1].second});
      }
    }
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
      return a.savings * b.area > b.savings * a.area;
    });
    double room = static_cast<double>(p_.area_budget - used);
    double savings = free_savings;
    for (const auto& s : segments) {
      if (room <= 0) break;
      double take = std::min(1.0, room / s.area);
      savings += take * s.savings;
      room -= take * s.area;
    }
    return committed + base - savings;
  }

  void Search(std::vector<uint8_t> dom) {
    if (aborted_) return;
    if (++nodes_ > opts_.node_limit) {
      aborted_ = true;
      return;
    }
    if (!Propagate(dom)) return;
    const double bound = LowerBound(dom);
    // Objectives are integers: only a bound below incumbent - 1 can improve.
    const double margin = 1e-9 * std::max(1.0, std::abs(bound));
    if (bound - margin > static_cast<double>(best_.objective_ps) - 1) return;
    int pick = -1;
    for (int v : order_) {
      if (!Fixed(dom[v])) {
        pick = v;
        break;
      }
    }
    if (pick < 0) {
      std::vector<Placement> placement(dom.size());
      for (std::size_t i = 0; i < dom.size(); ++i) {
        placement[i] = dom[i] == kSw   ? Placement::kSoftware
                       : dom[i] == kHw ? Placement::kHardware
                                       : Placement::kNone;
      }
      auto s = Evaluate(p_, std::move(placement));
      if (s.objective_ps < best_.objective_ps) best_ = std::move(s);
      return;
    }
    for (uint8_t value : {kHw, kSw, kNo}) {
      if (!(dom[pick] & value)) continue;
      std::vector<uint8_t> next = dom;
      next[pick] = value;
      Search(std::move(next));
    }
  }

  const PartitionProblem& p_;
  SolveOptions opts_;
  std::vector<std::vector<int>> groups_;                      // front() is the Root
  std::vector<std::pair<int, std::vector<int>>> implications_;  // caller, callee group
  std::vector<int> order_;
  PartitionSolution best_;
  uint64_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

PartitionSolution Solve(const PartitionProblem& p, const SolveOptions& opts) {
  if (p.root.size() != p.nodes.size()) throw PartitionError("problem not finalized");
  return BranchAndBound(p, opts).Run();
}

PartitionSolution SolveBruteForce(const PartitionProblem& p) {
  const int n = static_cast<int>(p.nodes.size());
  if (n > 20) throw PartitionError(fmt::format("brute force limited to 20 functions, got {}", n));
  if (p.root.size() != p.nodes.size()) throw PartitionError("problem not finalized");
  std::vector<Placement> cur(n, Placement::kNone);
  std::vector<Placement> best;
  int64_t best_cost = std::numeric_limits<int64_t>::max();
  auto feasible = [&]() {
    for (int i = 0; i < n; ++i) {
      if (p.nodes[i].merged && cur[i] == Placement::kSoftware) return false;
    }
    if (p.entry >= 0 && cur[p.entry] != Placement::kSoftware) return false;
    int64_t area = 0;
    for (int i = 0; i < n; ++i) {
      if (cur[i] == Placement::kHardware) area += p.nodes[i].area;
    }
    if (area > p.area_budget) return false;
    for (int r = 0; r < n; ++r) {
      if (!p.root[r]) continue;
      int count = cur[r] != Placement::kNone;
      for (int d : p.descend[r]) count += cur[d] != Placement::kNone;
      if (count != 1) return false;
    }
    for (int i = 0; i < n; ++i) {
      if (cur[i] != Placement::kHardware) continue;
      for (int j : p.nodes[i].callees) {
        if (!p.root[j]) continue;
        bool covered = cur[j] == Placement::kHardware;
        for (int d : p.descend[j]) covered |= cur[d] == Placement::kHardware;
        if (!covered) return false;
      }
    }
    return true;
  };
  auto cost = [&]() {
    int64_t c = 0;
    for (int i = 0; i < n; ++i) {
      if (cur[i] == Placement::kSoftware) c += p.nodes[i].sw_ps;
      if (cur[i] == Placement::kHardware) c += p.nodes[i].hw_ps;
    }
    for (const auto& e : p.edges) {
      if (cur[e.caller] == Placement::kSoftware && cur[e.callee] == Placement::kHardware) {
        c += e.cost_ps;
      }
    }
    return c;
  };
  std::function<void(int)> go = [&](int i) {
    if (i == n) {
      if (!feasible()) return;
      int64_t c = cost();
      if (c < best_cost) {
        best_cost = c;
        best = cur;
      }
      return;
    }
    for (Placement v : {Placement::kNone, Placement::kSoftware, Placement::kHardware}) {
      cur[i] = v;
      go(i + 1);
    }
  };
  go(0);
  if (best.empty()) throw PartitionError("no feasible assignment");
  return Evaluate(p, best);
}

}  // namespace mergedse::partition
