// Copyright 2026 The factorscan Authors.
//
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

#include "factorscan/factors/analyzer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace factorscan {

using minisol::Cfg;
using minisol::Stmt;
using minisol::StmtKind;
using minisol::VarPath;

namespace detail {

void PairCell::add(DepKind k, int order) {
  if (k == DepKind::None) return;
  if (kind == DepKind::None || static_cast<int>(k) < static_cast<int>(kind)) kind = k;
  if (order < 0) any_call_first = true;
  else if (order > 0) any_update_first = true;
  else any_clobbered = true;
}

std::int8_t PairCell::phi_O() const {
  if (kind == DepKind::None) return 0;
  if (any_call_first) return -1;
  if (any_clobbered) return 0;
  return any_update_first ? 1 : 0;
}

}  // namespace detail

namespace {

// A definition: the value of `var` produced at `site` (kEntry for the
// initial value on function entry).
struct Val {
  int site;
  VarPath var;
};

// `var` must not be redefined strictly between `from` and `to`.
struct Constraint {
  VarPath var;
  int from;
  int to;
};

// Statement-level DAG with the queries the factor definitions need:
// reachability, post-dominance, and joint path feasibility under
// def-clear constraints.
class FlowGraph {
 public:
  explicit FlowGraph(const FunctionGraph& g) : g_(g), n_(static_cast<int>(g.stmts.size())) {
    entry_ = n_;
    exit_ = n_ + 1;
    succ_.assign(n_ + 2, {});
    for (int i = 0; i < n_; ++i)
      for (int s : g.cfg.stmt_succ[i]) succ_[i].push_back(s == Cfg::kExit ? exit_ : s);
    if (n_ > 0) succ_[entry_].push_back(0);
    else succ_[entry_].push_back(exit_);
    writes_.assign(n_ + 2, {});
    for (int i = 0; i < n_; ++i) writes_[i] = g.du.stmts[i].writes;

    // Flat pre-order is topological: successors always have larger indices.
    reach_.assign(n_ + 2, std::vector<bool>(n_ + 2, false));
    for (int i = n_ - 1; i >= -1; --i) {
      int node = i < 0 ? entry_ : i;
      for (int s : succ_[node]) {
        reach_[node][s] = true;
        for (int k = 0; k < n_ + 2; ++k)
          if (reach_[s][k]) reach_[node][k] = true;
      }
    }
    // Post-dominators, exit first.
    pdom_.assign(n_ + 2, std::vector<bool>(n_ + 2, false));
    pdom_[exit_][exit_] = true;
    for (int i = n_ - 1; i >= 0; --i) {
      std::vector<bool> acc(n_ + 2, true);
      for (int s : succ_[i])
        for (int k = 0; k < n_ + 2; ++k) acc[k] = acc[k] && pdom_[s][k];
      acc[i] = true;
      pdom_[i] = acc;
    }
    for (int v = 0; v < n_; ++v)
      for (const auto& w : writes_[v])
        if (reachable(v)) def_sites_[w].push_back(v);
  }

  int size() const { return n_; }
  int entry() const { return entry_; }
  bool reachable(int s) const { return s == entry_ || reach_[entry_][s]; }
  bool reaches(int a, int b) const { return reach_[a][b]; }
  const std::set<VarPath>& writes(int s) const { return writes_[s]; }
  const minisol::StmtDefUse& du(int s) const { return g_.du.stmts[s]; }
  const Stmt& stmt(int s) const { return *g_.stmts[s]; }

  // Definition sites whose value of `var` could reach a later read.
  std::vector<int> sites_of(const VarPath& var) const {
    std::vector<int> out{entry_};
    if (auto it = def_sites_.find(var); it != def_sites_.end())
      out.insert(out.end(), it->second.begin(), it->second.end());
    return out;
  }

  // Control dependence of `u` on branch `b`.
  bool control_dependent(int u, int b) const {
    if (stmt(b).kind != StmtKind::If || u == b) return false;
    int t = succ_[b][0], e = succ_[b][1];
    return (pdom_[t][u] && !pdom_[e][u]) || (pdom_[e][u] && !pdom_[t][u]);
  }

  // Is there an entry-to-exit path through every point, honouring every
  // constraint? Points in a DAG admit at most one visiting order, so the
  // check decomposes into independent segment queries.
  bool feasible(std::vector<int> points, const std::vector<Constraint>& cons) const {
    for (const auto& c : cons) {
      points.push_back(c.from);
      points.push_back(c.to);
    }
    points.push_back(entry_);
    for (int p : points)
      if (!reachable(p)) return false;
    std::sort(points.begin(), points.end(), [&](int a, int b) { return topo(a) < topo(b); });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
      if (!reach_[points[i]][points[i + 1]]) return false;
    std::map<int, int> pos;
    for (std::size_t i = 0; i < points.size(); ++i) pos[points[i]] = static_cast<int>(i);
    for (const auto& c : cons) {
      int a = pos[c.from], b = pos[c.to];
      if (a > b) return false;
      for (int k = a + 1; k < b; ++k)
        if (writes_[points[k]].count(c.var)) return false;
    }
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      std::set<VarPath> forbidden;
      for (const auto& c : cons)
        if (pos[c.from] <= static_cast<int>(i) && static_cast<int>(i) + 1 <= pos[c.to])
          forbidden.insert(c.var);
      if (!avoid_reach(points[i], points[i + 1], forbidden)) return false;
    }
    return true;
  }

 private:
  int topo(int node) const {
    if (node == entry_) return -1;
    if (node == exit_) return n_ + 1;
    return node;
  }

  bool avoid_reach(int a, int b, const std::set<VarPath>& forbidden) const {
    if (forbidden.empty()) return reach_[a][b];
    std::vector<bool> seen(n_ + 2, false);
    std::vector<int> stack{a};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int s : succ_[x]) {
        if (s == b) return true;
        if (seen[s] || !reach_[s][b]) continue;
        seen[s] = true;
        bool blocked = false;
        for (const auto& w : writes_[s])
          if (forbidden.count(w)) {
            blocked = true;
            break;
          }
        if (!blocked) stack.push_back(s);
      }
    }
    return false;
  }

  const FunctionGraph& g_;
  int n_;
  int entry_ = 0;
  int exit_ = 0;
  std::vector<std::vector<int>> succ_;
  std::vector<std::set<VarPath>> writes_;
  std::vector<std::vector<bool>> reach_;
  std::vector<std::vector<bool>> pdom_;
  std::map<VarPath, std::vector<int>> def_sites_;
};

// Partial def-use chain under construction.
struct Chain {
  Val cur;
  std::vector<int> points;
  std::vector<Constraint> cons;
  int links = 0;
  std::vector<int> sites;  // statements along the chain, for witnesses
};

class PairAnalyzer {
 public:
  explicit PairAnalyzer(const FlowGraph& f) : f_(f) {}

  // Values a side contributes: the inputs it reads plus its own writes.
  std::set<VarPath> side_inputs(int s, bool is_call) const {
    return is_call ? f_.du(s).call_inputs : f_.du(s).inputs();
  }

  bool direct(int c, int u, std::string& why) const {
    const auto& ci = f_.du(c).call_inputs;
    const auto ui = f_.du(u).inputs();
    for (const auto& x : ci) {
      if (!ui.count(x)) continue;
      for (int d : f_.sites_of(x)) {
        if (d == c || d == u) continue;
        if (f_.feasible({d, c, u}, {{x, d, c}, {x, d, u}})) {
          why = "shares " + x;
          return true;
        }
      }
    }
    for (const auto& w : f_.writes(c))
      if (ui.count(w) && f_.feasible({c, u}, {{w, c, u}})) {
        why = "update reads " + w + " produced by the call";
        return true;
      }
    for (const auto& w : f_.writes(u))
      if (ci.count(w) && f_.feasible({u, c}, {{w, u, c}})) {
        why = "call reads " + w + " written by the update";
        return true;
      }
    return false;
  }

  // Proper ancestry between a value of side `a` and a value of side `b`.
  bool indirect_from(int a, bool a_is_call, int b, bool b_is_call, std::vector<int>& via) const {
    const auto b_in = side_inputs(b, b_is_call);
    auto terminal = [&](const Chain& ch) {
      if (ch.links < 1) return false;
      if (ch.cur.site == b) return true;
      if (!b_in.count(ch.cur.var)) return false;
      auto cons = ch.cons;
      cons.push_back({ch.cur.var, ch.cur.site, b});
      return f_.feasible(ch.points, cons);
    };
    for (const auto& start : starts(a, a_is_call)) {
      if (search(start, b, terminal, via)) return true;
    }
    return false;
  }

  bool indirect(int c, int u, std::string& why) const {
    std::vector<int> via;
    if (indirect_from(c, true, u, false, via) || indirect_from(u, false, c, true, via)) {
      why = "chain through";
      for (int s : via) why += " #" + std::to_string(s);
      return true;
    }
    return false;
  }

  bool ctrl(int c, int u, std::string& why) const {
    for (int b = 0; b < f_.size(); ++b) {
      if (!f_.reachable(b) || !f_.control_dependent(u, b)) continue;
      if (b == c) {
        why = "branch condition is the call";
        return true;
      }
      if (!f_.reaches(c, b)) continue;
      const auto b_in = f_.du(b).inputs();
      auto terminal = [&](const Chain& ch) {
        if (!b_in.count(ch.cur.var)) return false;
        auto cons = ch.cons;
        cons.push_back({ch.cur.var, ch.cur.site, b});
        return f_.feasible(ch.points, cons);
      };
      for (const auto& w : f_.writes(c)) {
        Chain ch{{c, w}, {c}, {}, 0, {c}};
        std::vector<int> via;
        if (terminal(ch) || search(ch, b, terminal, via)) {
          why = "branch #" + std::to_string(b) + " tests the call result";
          return true;
        }
      }
    }
    return false;
  }

 private:
  std::vector<Chain> starts(int a, bool is_call) const {
    std::vector<Chain> out;
    for (const auto& w : f_.writes(a)) out.push_back({{a, w}, {a}, {}, 0, {a}});
    for (const auto& x : side_inputs(a, is_call))
      for (int d : f_.sites_of(x))
        if (d != a) out.push_back({{d, x}, {d, a}, {{x, d, a}}, 0, {a}});
    return out;
  }

  // Depth-first extension of a def-use chain; `anchor` must stay on the
  // path throughout.
  bool search(const Chain& ch, int anchor, const std::function<bool(const Chain&)>& terminal,
              std::vector<int>& via) const {
    for (int s = 0; s < f_.size(); ++s) {
      if (s == ch.cur.site || !f_.reachable(s)) continue;
      if (ch.cur.site != f_.entry() && !f_.reaches(ch.cur.site, s)) continue;
      if (!f_.du(s).inputs().count(ch.cur.var)) continue;
      for (const auto& w : f_.writes(s)) {
        Chain next = ch;
        next.cur = {s, w};
        next.points.push_back(s);
        next.cons.push_back({ch.cur.var, ch.cur.site, s});
        next.links += 1;
        next.sites.push_back(s);
        auto probe = next.points;
        probe.push_back(anchor);
        if (!f_.feasible(probe, next.cons)) continue;
        next.points.push_back(anchor);
        if (terminal(next)) {
          via = next.sites;
          return true;
        }
        if (search(next, anchor, terminal, via)) return true;
      }
    }
    return false;
  }

  const FlowGraph& f_;
};

int stmt_order(const FlowGraph& f, int c, int u) {
  if (c == u || f.reaches(c, u)) return -1;
  if (!f.reaches(u, c)) return 0;
  for (int s = 0; s < f.size(); ++s) {
    if (!f.reaches(u, s) || !f.reaches(s, c)) continue;
    for (const auto& w : f.writes(u))
      if (f.writes(s).count(w)) return 0;
  }
  return 1;
}

bool has_state_write(const FunctionGraph& g, int s) { return !g.du.stmts[s].state_writes.empty(); }

struct LinePairs {
  std::map<std::pair<int, int>, detail::PairCell> cells;
  std::map<std::pair<int, int>, std::string> why;
};

LinePairs analyze_pairs(const ProgramUnit& p, const AnalysisOptions& opt) {
  LinePairs out;
  for (const auto& g : p.functions) {
    FlowGraph f(g);
    PairAnalyzer pa(f);
    const int n = f.size();
    for (int c = 0; c < n; ++c) {
      if (!g.stmts[c]->call || !f.reachable(c)) continue;
      for (int u = 0; u < n; ++u) {
        if (!has_state_write(g, u) || !f.reachable(u)) continue;
        DepKind k = DepKind::None;
        std::string why;
        if (c == u) {
          k = DepKind::Direct;
          why = "call and update share a statement";
        } else if (pa.direct(c, u, why)) {
          k = DepKind::Direct;
        } else if (pa.indirect(c, u, why)) {
          k = DepKind::Indirect;
        } else if (!opt.data_only && pa.ctrl(c, u, why)) {
          k = DepKind::Ctrl;
        }
        if (k == DepKind::None) continue;
        auto key = std::make_pair(g.stmts[c]->line - 1, g.stmts[u]->line - 1);
        out.cells[key].add(k, stmt_order(f, c, u));
        if (!out.why.count(key)) out.why[key] = std::string(to_string(k)) + ": " + why;
      }
    }
  }
  return out;
}

}  // namespace

BitVector external_call_units(const ProgramUnit& p) {
  BitVector e = BitVector::Zero(p.n_lines());
  for (const auto& g : p.functions)
    for (const Stmt* s : g.stmts)
      if (s->call) e(s->line - 1) = 1;
  return e;
}

BitVector state_update_units(const ProgramUnit& p) {
  BitVector v = BitVector::Zero(p.n_lines());
  for (const auto& g : p.functions)
    for (std::size_t i = 0; i < g.stmts.size(); ++i)
      if (has_state_write(g, static_cast<int>(i))) v(g.stmts[i]->line - 1) = 1;
  return v;
}

DependencyResult dependency_matrix(const ProgramUnit& p, const AnalysisOptions& opt) {
  const int n = p.n_lines();
  DependencyResult r{Int8Matrix::Zero(n, n), Int8Matrix::Zero(n, n), {}};
  auto pairs = analyze_pairs(p, opt);
  for (const auto& [key, cell] : pairs.cells) {
    r.phi_D(key.first, key.second) = 1;
    r.dep_kind(key.first, key.second) = static_cast<std::int8_t>(cell.kind);
    r.witnesses.push_back({key.first, key.second, pairs.why[key]});
  }
  return r;
}

Int8Matrix ordering_matrix(const ProgramUnit& p, const Int8Matrix& phi_D) {
  const int n = p.n_lines();
  Int8Matrix o = Int8Matrix::Zero(n, n);
  std::map<std::pair<int, int>, detail::PairCell> cells;
  for (const auto& g : p.functions) {
    FlowGraph f(g);
    for (int c = 0; c < f.size(); ++c) {
      if (!g.stmts[c]->call) continue;
      for (int u = 0; u < f.size(); ++u) {
        if (!has_state_write(g, u)) continue;
        int lc = g.stmts[c]->line - 1, lu = g.stmts[u]->line - 1;
        if (!phi_D(lc, lu) || !f.reachable(c) || !f.reachable(u)) continue;
        cells[{lc, lu}].add(DepKind::Direct, stmt_order(f, c, u));
      }
    }
  }
  for (const auto& [key, cell] : cells) o(key.first, key.second) = cell.phi_O();
  return o;
}

FactorSet analyze(const ProgramUnit& p, const AnalysisOptions& opt) {
  FactorSet fs = FactorSet::zeros(p.n_lines());
  fs.phi_E = external_call_units(p);
  fs.phi_S = state_update_units(p);
  auto pairs = analyze_pairs(p, opt);
  for (const auto& [key, cell] : pairs.cells) {
    fs.phi_D(key.first, key.second) = 1;
    fs.dep_kind(key.first, key.second) = static_cast<std::int8_t>(cell.kind);
    fs.phi_O(key.first, key.second) = cell.phi_O();
    fs.witnesses.push_back({key.first, key.second, pairs.why[key]});
  }
  for (const auto& g : p.functions) {
    for (std::size_t i = 0; i < g.stmts.size(); ++i) {
      int line = g.stmts[i]->line - 1;
      if (g.depth[i] > 0) fs.in_branch[line] = 1;
      if (g.stmts[i]->call) fs.call_kind[line] = g.stmts[i]->call->kind;
    }
  }
  return fs;
}

}  // namespace factorscan
