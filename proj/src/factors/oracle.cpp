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

#include "factorscan/factors/oracle.hpp"

#include <map>
#include <set>

#include "factorscan/error.hpp"

namespace factorscan {

using minisol::Stmt;
using minisol::StmtKind;
using minisol::VarPath;

namespace {

struct Step {
  int stmt;
  int outcome;  // 0 plain, 1 then, 2 else
};
using Path = std::vector<Step>;

class PathEnumerator {
 public:
  explicit PathEnumerator(const FunctionGraph& g) {
    for (std::size_t i = 0; i < g.stmts.size(); ++i) index_[g.stmts[i]] = static_cast<int>(i);
  }

  // Every complete execution of `body` starting from each prefix. The flag
  // marks executions that hit a `return`.
  std::vector<std::pair<Path, bool>> run(const std::vector<Stmt>& body,
                                         std::vector<std::pair<Path, bool>> cur) const {
    for (const Stmt& s : body) {
      std::vector<std::pair<Path, bool>> next;
      int i = index_.at(&s);
      for (auto& [p, done] : cur) {
        if (done) {
          next.push_back({p, true});
          continue;
        }
        if (s.kind == StmtKind::Return) {
          Path q = p;
          q.push_back({i, 0});
          next.push_back({q, true});
        } else if (s.kind == StmtKind::If) {
          for (int o : {1, 2}) {
            Path q = p;
            q.push_back({i, o});
            auto sub = run(o == 1 ? s.then_body : s.else_body, {{q, false}});
            next.insert(next.end(), sub.begin(), sub.end());
          }
        } else {
          Path q = p;
          q.push_back({i, 0});
          next.push_back({q, false});
        }
      }
      cur = std::move(next);
    }
    return cur;
  }

 private:
  std::map<const Stmt*, int> index_;
};

// Definitions produced along one concrete path.
struct Trace {
  struct Def {
    int stmt;  // -1 for the entry value
    VarPath var;
    std::set<int> ancestors;
  };
  std::vector<Def> defs;
  std::vector<std::map<VarPath, int>> in;  // per position: input var -> def
  std::vector<std::vector<int>> out;       // per position: defs written
  std::map<int, int> pos;                  // stmt -> position on the path
};

Trace simulate(const FunctionGraph& g, const Path& path) {
  Trace t;
  std::map<VarPath, int> env;
  auto lookup = [&](const VarPath& v) {
    auto it = env.find(v);
    if (it != env.end()) return it->second;
    t.defs.push_back({-1, v, {}});
    int id = static_cast<int>(t.defs.size()) - 1;
    env[v] = id;
    return id;
  };
  for (std::size_t k = 0; k < path.size(); ++k) {
    int s = path[k].stmt;
    const auto& du = g.du.stmts[s];
    t.pos[s] = static_cast<int>(k);
    std::map<VarPath, int> in;
    for (const auto& v : du.reads) in[v] = lookup(v);
    for (const auto& v : du.keys) in[v] = lookup(v);
    for (const auto& v : du.call_inputs) in[v] = lookup(v);
    std::set<int> anc;
    for (const auto& [v, id] : in) {
      anc.insert(id);
      anc.insert(t.defs[id].ancestors.begin(), t.defs[id].ancestors.end());
    }
    std::vector<int> out;
    for (const auto& w : du.writes) {
      t.defs.push_back({s, w, anc});
      out.push_back(static_cast<int>(t.defs.size()) - 1);
    }
    for (std::size_t j = 0; j < du.writes.size(); ++j) env[*std::next(du.writes.begin(), j)] = out[j];
    t.in.push_back(std::move(in));
    t.out.push_back(std::move(out));
  }
  return t;
}

struct StmtPair {
  DepKind kind = DepKind::None;
  bool together = false;
  bool call_first = false;
  bool clobbered = false;
};

int count_branches(const std::vector<Stmt>& body) {
  int n = 0;
  for (const auto& s : body)
    if (s.kind == StmtKind::If) n += 1 + count_branches(s.then_body) + count_branches(s.else_body);
  return n;
}

}  // namespace

FactorSet brute_force_oracle(const ProgramUnit& p, const AnalysisOptions& opt) {
  int branches = 0;
  for (const auto& g : p.functions) branches += count_branches(g.fn->body);
  if (branches > kOracleMaxBranches || p.n_lines() > kOracleMaxLines)
    throw Error("TooLarge", "program exceeds the path-enumeration bound (" +
                                std::to_string(branches) + " branches, " +
                                std::to_string(p.n_lines()) + " lines)");

  FactorSet fs = FactorSet::zeros(p.n_lines());
  std::map<std::pair<int, int>, detail::PairCell> cells;

  for (const auto& g : p.functions) {
    const int n = static_cast<int>(g.stmts.size());
    for (int i = 0; i < n; ++i) {
      int line = g.stmts[i]->line - 1;
      if (g.stmts[i]->call) {
        fs.phi_E(line) = 1;
        fs.call_kind[line] = g.stmts[i]->call->kind;
      }
      if (!g.du.stmts[i].state_writes.empty()) fs.phi_S(line) = 1;
      if (g.depth[i] > 0) fs.in_branch[line] = 1;
    }

    PathEnumerator en(g);
    std::vector<Path> paths;
    for (auto& [path, done] : en.run(g.fn->body, {{Path{}, false}})) paths.push_back(path);
    std::vector<Trace> traces;
    for (const auto& path : paths) traces.push_back(simulate(g, path));

    // Control dependence from the path set: some outcome of b always leads
    // to u, while the other outcome can avoid it.
    auto after = [&](std::size_t k, int b, int u) {
      const auto& pos = traces[k].pos;
      return pos.count(u) && pos.at(u) > pos.at(b);
    };
    auto outcome_of = [&](std::size_t k, int b) {
      const auto& pos = traces[k].pos;
      auto it = pos.find(b);
      return it == pos.end() ? 0 : paths[k][it->second].outcome;
    };
    auto control_dependent = [&](int u, int b) {
      if (g.stmts[b]->kind != StmtKind::If || u == b) return false;
      for (int o : {1, 2}) {
        bool any = false, all = true, escape = false;
        for (std::size_t k = 0; k < paths.size(); ++k) {
          int oc = outcome_of(k, b);
          if (oc == o) {
            any = true;
            all = all && after(k, b, u);
          } else if (oc != 0 && !after(k, b, u)) {
            escape = true;
          }
        }
        if (any && all && escape) return true;
      }
      return false;
    };

    std::map<std::pair<int, int>, StmtPair> pairs;
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const Trace& t = traces[k];
      const Path& path = paths[k];
      for (int c = 0; c < n; ++c) {
        if (!g.stmts[c]->call || !t.pos.count(c)) continue;
        int tc = t.pos.at(c);
        std::set<int> vc(t.out[tc].begin(), t.out[tc].end());
        for (const auto& v : g.du.stmts[c].call_inputs) vc.insert(t.in[tc].at(v));
        for (int u = 0; u < n; ++u) {
          if (g.du.stmts[u].state_writes.empty() || !t.pos.count(u)) continue;
          int tu = t.pos.at(u);
          std::set<int> vu(t.out[tu].begin(), t.out[tu].end());
          for (const auto& v : g.du.stmts[u].inputs()) vu.insert(t.in[tu].at(v));

          DepKind kind = DepKind::None;
          if (c == u) {
            kind = DepKind::Direct;
          } else {
            for (int x : vc)
              if (vu.count(x)) kind = DepKind::Direct;
            if (kind == DepKind::None) {
              for (int x : vc)
                for (int y : vu)
                  if (t.defs[y].ancestors.count(x) || t.defs[x].ancestors.count(y))
                    kind = DepKind::Indirect;
            }
            if (kind == DepKind::None && !opt.data_only) {
              for (int tb = tc; tb < tu && kind == DepKind::None; ++tb) {
                int b = path[tb].stmt;
                if (!control_dependent(u, b)) continue;
                bool derived = b == c;
                for (const auto& [v, id] : t.in[tb]) {
                  if (!g.du.stmts[b].inputs().count(v)) continue;
                  for (int o : t.out[tc])
                    if (id == o || t.defs[id].ancestors.count(o)) derived = true;
                }
                if (derived) kind = DepKind::Ctrl;
              }
            }
          }
          StmtPair& sp = pairs[{c, u}];
          sp.together = true;
          if (kind != DepKind::None &&
              (sp.kind == DepKind::None || static_cast<int>(kind) < static_cast<int>(sp.kind)))
            sp.kind = kind;
          if (c == u || tc < tu) {
            sp.call_first = true;
          } else {
            for (int m = tu + 1; m < tc; ++m)
              for (const auto& w : g.du.stmts[u].writes)
                if (g.du.stmts[path[m].stmt].writes.count(w)) sp.clobbered = true;
          }
        }
      }
    }
    for (const auto& [key, sp] : pairs) {
      if (sp.kind == DepKind::None) continue;
      int order = sp.call_first ? -1 : sp.clobbered ? 0 : 1;
      cells[{g.stmts[key.first]->line - 1, g.stmts[key.second]->line - 1}].add(sp.kind, order);
    }
  }
  for (const auto& [key, cell] : cells) {
    fs.phi_D(key.first, key.second) = 1;
    fs.dep_kind(key.first, key.second) = static_cast<std::int8_t>(cell.kind);
    fs.phi_O(key.first, key.second) = cell.phi_O();
    fs.witnesses.push_back({key.first, key.second, "path enumeration"});
  }
  return fs;
}

}  // namespace factorscan
