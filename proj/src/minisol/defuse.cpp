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

#include "factorscan/minisol/defuse.hpp"

#include "factorscan/minisol/cfg.hpp"
#include "factorscan/minisol/printer.hpp"
#include "factorscan/minisol/semantic.hpp"

namespace factorscan::minisol {
namespace {

// Identifier at the bottom of a member/index chain, or null.
const Expr* chain_root(const Expr& e) {
  const Expr* p = &e;
  while (p->kind == ExprKind::Member || p->kind == ExprKind::Index) p = p->children[0].get();
  return p->kind == ExprKind::Ident ? p : nullptr;
}

class Collector {
 public:
  explicit Collector(const Scope& scope) : scope_(scope) {}

  bool is_variable(const std::string& name) const {
    if (scope_.kind_of(name) != SymbolKind::None) return true;
    if (scope_.is_type_name(name)) return false;
    return true;  // globals such as msg/block/this and undeclared names
  }

  // Index sub-expressions of a path go to `keys`.
  void path_keys(const Expr& e, std::set<VarPath>& keys) {
    const Expr* p = &e;
    while (p->kind == ExprKind::Member || p->kind == ExprKind::Index) {
      if (p->kind == ExprKind::Index) value(*p->children[1], keys, keys);
      p = p->children[0].get();
    }
  }

  void value(const Expr& e, std::set<VarPath>& reads, std::set<VarPath>& keys) {
    switch (e.kind) {
      case ExprKind::Number:
      case ExprKind::String:
      case ExprKind::Bool: return;
      case ExprKind::Ident:
        if (is_variable(e.text)) reads.insert(e.text);
        return;
      case ExprKind::Member:
      case ExprKind::Index: {
        const Expr* root = chain_root(e);
        if (root && is_variable(root->text)) {
          reads.insert(print_expr(e));
          path_keys(e, keys);
          return;
        }
        // Non-path base, e.g. IERC20(a).x or f()[i].
        value(*e.children[0], reads, keys);
        if (e.kind == ExprKind::Index) value(*e.children[1], keys, keys);
        return;
      }
      case ExprKind::Call: {
        const Expr& callee = *e.children[0];
        if (callee.kind == ExprKind::Member) {
          const Expr& recv = *callee.children[0];
          bool library = recv.kind == ExprKind::Ident && !is_variable(recv.text);
          bool abi = recv.kind == ExprKind::Ident && (recv.text == "abi");
          if (!library && !abi) value(recv, reads, keys);
        } else if (callee.kind != ExprKind::Ident) {
          value(callee, reads, keys);
        }
        for (std::size_t i = 1; i < e.children.size(); ++i) value(*e.children[i], reads, keys);
        for (const auto& o : e.options) value(*o.value, reads, keys);
        return;
      }
      case ExprKind::Unary:
        value(*e.children[0], reads, keys);
        return;
      case ExprKind::Binary:
        value(*e.children[0], reads, keys);
        value(*e.children[1], reads, keys);
        return;
    }
  }

 private:
  const Scope& scope_;
};

}  // namespace

std::set<VarPath> StmtDefUse::inputs() const {
  std::set<VarPath> out = reads;
  out.insert(keys.begin(), keys.end());
  return out;
}

std::string path_root(const VarPath& p) {
  auto cut = p.find_first_of(".[");
  return cut == std::string::npos ? p : p.substr(0, cut);
}

DefUse build_defuse(const Ast& ast, const FunctionDef& fn) {
  Scope scope(ast);
  scope.enter_function(fn);
  DefUse du;
  for (const Stmt* sp : flatten(fn)) {
    const Stmt& s = *sp;
    StmtDefUse d;
    Collector col(scope);
    if (s.value) col.value(*s.value, d.reads, d.keys);
    if (s.message) col.value(*s.message, d.reads, d.keys);
    if (s.target) {
      VarPath lhs = print_expr(s.target);
      d.writes.insert(lhs);
      col.path_keys(*s.target, d.keys);
      if (s.kind == StmtKind::Assign && s.op != AssignOp::Plain) d.reads.insert(lhs);
    }
    for (const auto& slot : s.tuple)
      if (!slot.name.empty()) d.writes.insert(slot.name);

    // Array push/pop mutate the receiver in place.
    if (s.kind == StmtKind::Expr && s.value->kind == ExprKind::Call &&
        s.value->children[0]->kind == ExprKind::Member) {
      const Expr& callee = *s.value->children[0];
      const std::string& m = callee.text;
      auto t = scope.type_of(*callee.children[0]);
      if ((m == "push" || m == "pop") && t && t->kind == TypeName::Kind::Array) {
        VarPath recv = print_expr(*callee.children[0]);
        d.writes.insert(recv);
        d.reads.insert(recv);
      }
    }

    if (s.call) col.value(*s.call->call, d.call_inputs, d.call_inputs);

    if (!s.decl_type.empty() && s.target) scope.declare_local(s.target->text, s.decl_type);
    for (const auto& slot : s.tuple)
      if (!slot.type.empty()) scope.declare_local(slot.name, slot.type);

    for (const auto& w : d.writes)
      if (scope.kind_of(path_root(w)) == SymbolKind::State) d.state_writes.insert(w);
    du.stmts.push_back(std::move(d));
  }
  return du;
}

}  // namespace factorscan::minisol
