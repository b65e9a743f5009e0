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

#include "factorscan/minisol/cfg.hpp"

#include <functional>
#include <map>

namespace factorscan::minisol {
namespace {

void flatten_into(const std::vector<Stmt>& body, std::vector<const Stmt*>& out) {
  for (const Stmt& s : body) {
    out.push_back(&s);
    if (s.kind == StmtKind::If) {
      flatten_into(s.then_body, out);
      flatten_into(s.else_body, out);
    }
  }
}

struct Wiring {
  std::map<const Stmt*, int> index;
  std::vector<std::vector<int>> succ;
  std::vector<std::vector<EdgeKind>> kind;

  int first(const std::vector<Stmt>& body, int cont) const {
    return body.empty() ? cont : index.at(&body.front());
  }

  void wire(const std::vector<Stmt>& body, int cont) {
    for (std::size_t k = 0; k < body.size(); ++k) {
      const Stmt& s = body[k];
      int i = index.at(&s);
      int after = k + 1 < body.size() ? index.at(&body[k + 1]) : cont;
      if (s.kind == StmtKind::Return) {
        succ[i] = {Cfg::kExit};
        kind[i] = {EdgeKind::Return};
      } else if (s.kind == StmtKind::If) {
        succ[i] = {first(s.then_body, after), first(s.else_body, after)};
        kind[i] = {EdgeKind::Then, EdgeKind::Else};
        wire(s.then_body, after);
        wire(s.else_body, after);
      } else {
        succ[i] = {after};
        kind[i] = {EdgeKind::Fallthrough};
      }
    }
  }
};

}  // namespace

std::vector<const Stmt*> flatten(const FunctionDef& fn) {
  std::vector<const Stmt*> out;
  flatten_into(fn.body, out);
  return out;
}

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Fallthrough: return "fallthrough";
    case EdgeKind::Then: return "then";
    case EdgeKind::Else: return "else";
    case EdgeKind::Return: return "return";
  }
  return "?";
}

Cfg build_cfg(const FunctionDef& fn) {
  Cfg g;
  auto flat = flatten(fn);
  const int n = static_cast<int>(flat.size());
  Wiring w;
  for (int i = 0; i < n; ++i) w.index[flat[i]] = i;
  w.succ.assign(n, {});
  w.kind.assign(n, {});
  w.wire(fn.body, Cfg::kExit);
  g.stmt_succ = w.succ;
  g.stmt_succ_kind = w.kind;

  if (n == 0) {
    g.edges.push_back({Cfg::kEntry, Cfg::kExit, EdgeKind::Fallthrough});
    return g;
  }

  std::vector<int> preds(n, 0);
  for (int i = 0; i < n; ++i)
    for (int s : w.succ[i])
      if (s >= 0) ++preds[s];

  // Leaders: the first statement, branch targets, join points, and any
  // statement not entered by fallthrough from its flat predecessor.
  std::vector<bool> leader(n, false);
  leader[0] = true;
  for (int i = 0; i < n; ++i) {
    if (preds[i] > 1) leader[i] = true;
    if (w.kind[i].front() != EdgeKind::Fallthrough) {
      for (int s : w.succ[i])
        if (s >= 0) leader[s] = true;
      if (i + 1 < n) leader[i + 1] = true;
    } else if (w.succ[i].front() != i + 1 && i + 1 < n) {
      leader[i + 1] = true;
    }
  }
  g.block_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (leader[i]) g.blocks.emplace_back();
    g.blocks.back().push_back(i);
    g.block_of[i] = static_cast<int>(g.blocks.size()) - 1;
  }
  auto block_id = [&](int stmt) { return stmt < 0 ? stmt : g.block_of[stmt]; };
  g.edges.push_back({Cfg::kEntry, 0, EdgeKind::Fallthrough});
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    int last = g.blocks[b].back();
    for (std::size_t k = 0; k < w.succ[last].size(); ++k)
      g.edges.push_back({static_cast<int>(b), block_id(w.succ[last][k]), w.kind[last][k]});
  }

  g.reachable.assign(n, false);
  std::function<void(int)> visit = [&](int i) {
    if (i < 0 || g.reachable[i]) return;
    g.reachable[i] = true;
    for (int s : w.succ[i]) visit(s);
  };
  visit(0);
  return g;
}

std::vector<int> Cfg::successors(int block) const {
  std::vector<int> out;
  for (const auto& e : edges)
    if (e.from == block) out.push_back(e.to);
  return out;
}

long long Cfg::count_paths() const {
  std::map<int, long long> memo;
  std::function<long long(int)> count = [&](int b) -> long long {
    if (b == kExit) return 1;
    if (auto it = memo.find(b); it != memo.end()) return it->second;
    long long total = 0;
    for (int s : successors(b)) total += count(s);
    memo[b] = total;
    return total;
  };
  return count(kEntry);
}

}  // namespace factorscan::minisol
