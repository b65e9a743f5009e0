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

#include "factorscan/minisol/printer.hpp"

#include <sstream>

namespace factorscan::minisol {
namespace {

int precedence(const Expr& e) {
  if (e.kind != ExprKind::Binary) return e.kind == ExprKind::Unary ? 12 : 13;
  const std::string& op = e.text;
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=") return 3;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
  if (op == "|") return 5;
  if (op == "^") return 6;
  if (op == "&") return 7;
  if (op == "<<" || op == ">>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  return 11;  // **
}

std::string wrap(const Expr& e, bool parens) {
  std::string s = print_expr(e);
  return parens ? "(" + s + ")" : s;
}

const char* indent(int depth) {
  static const std::string spaces(64, ' ');
  return spaces.c_str() + (64 - std::min(depth * 4, 64));
}

void print_body(std::ostringstream& out, const std::vector<Stmt>& body, int depth);

void print_stmt(std::ostringstream& out, const Stmt& s, int depth) {
  if (s.anchor) out << indent(depth) << anchor_spelling(*s.anchor) << '\n';
  out << indent(depth) << print_stmt_head(s) << '\n';
  if (s.kind != StmtKind::If) return;
  print_body(out, s.then_body, depth + 1);
  if (s.has_else) {
    out << indent(depth) << "} else {\n";
    print_body(out, s.else_body, depth + 1);
  }
  out << indent(depth) << "}\n";
}

void print_body(std::ostringstream& out, const std::vector<Stmt>& body, int depth) {
  for (const Stmt& s : body) print_stmt(out, s, depth);
}

std::string params(const std::vector<Param>& ps) {
  std::string out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += ps[i].type;
    if (!ps[i].name.empty()) out += " " + ps[i].name;
  }
  return out;
}

}  // namespace

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Ident:
    case ExprKind::Number:
    case ExprKind::String:
    case ExprKind::Bool: return e.text;
    case ExprKind::Member: {
      const Expr& b = *e.children[0];
      return wrap(b, precedence(b) < 13) + "." + e.text;
    }
    case ExprKind::Index: {
      const Expr& b = *e.children[0];
      return wrap(b, precedence(b) < 13) + "[" + print_expr(*e.children[1]) + "]";
    }
    case ExprKind::Call: {
      const Expr& callee = *e.children[0];
      std::string s = wrap(callee, precedence(callee) < 13);
      if (!e.options.empty()) {
        s += "{";
        for (std::size_t i = 0; i < e.options.size(); ++i) {
          if (i) s += ", ";
          s += e.options[i].name + ": " + print_expr(*e.options[i].value);
        }
        s += "}";
      }
      s += "(";
      for (std::size_t i = 1; i < e.children.size(); ++i) {
        if (i > 1) s += ", ";
        s += print_expr(*e.children[i]);
      }
      return s + ")";
    }
    case ExprKind::Unary: {
      const Expr& x = *e.children[0];
      return e.text + wrap(x, precedence(x) < 12);
    }
    case ExprKind::Binary: {
      const Expr& l = *e.children[0];
      const Expr& r = *e.children[1];
      int p = precedence(e);
      bool right_assoc = e.text == "**";
      bool lp = precedence(l) < p || (right_assoc && precedence(l) == p);
      bool rp = precedence(r) < p || (!right_assoc && precedence(r) == p);
      return wrap(l, lp) + " " + e.text + " " + wrap(r, rp);
    }
  }
  return {};
}

std::string print_stmt_head(const Stmt& s) {
  auto tuple = [&]() {
    std::string t = "(";
    for (std::size_t i = 0; i < s.tuple.size(); ++i) {
      if (i) t += ", ";
      const auto& slot = s.tuple[i];
      if (!slot.type.empty()) t += slot.type + " ";
      t += slot.name;
    }
    return t + ")";
  };
  switch (s.kind) {
    case StmtKind::Require: {
      std::string r = "require(" + print_expr(s.value);
      if (s.message) r += ", " + print_expr(s.message);
      return r + ");";
    }
    case StmtKind::If: return "if (" + print_expr(s.value) + ") {";
    case StmtKind::Return: return s.value ? "return " + print_expr(s.value) + ";" : "return;";
    case StmtKind::Expr: return print_expr(s.value) + ";";
    case StmtKind::VarDecl:
    case StmtKind::Assign:
    case StmtKind::ExternalCall: {
      std::string lhs;
      if (!s.tuple.empty()) {
        lhs = tuple();
      } else if (s.target) {
        lhs = s.decl_type.empty() ? print_expr(s.target) : s.decl_type + " " + print_expr(s.target);
      }
      if (lhs.empty()) return print_expr(s.value) + ";";
      if (!s.value) return lhs + ";";
      const char* op = s.op == AssignOp::Plain ? " = " : s.op == AssignOp::PlusAssign ? " += " : " -= ";
      return lhs + op + print_expr(s.value) + ";";
    }
  }
  return {};
}

std::string print(const Ast& ast) {
  std::ostringstream out;
  for (const auto& p : ast.preamble) out << p.text << '\n';
  out << "contract " << ast.contract_name << " {\n";
  for (const auto& m : ast.member_order) {
    switch (m.kind) {
      case MemberKind::StateVar: {
        const VarDecl& v = ast.state_vars[m.index];
        out << indent(1) << v.type;
        for (const auto& mod : v.modifiers) out << ' ' << mod;
        out << ' ' << v.name;
        if (v.init) out << " = " << print_expr(v.init);
        out << ";\n";
        break;
      }
      case MemberKind::Struct: {
        const StructDef& s = ast.structs[m.index];
        out << indent(1) << "struct " << s.name << " {\n";
        for (const auto& f : s.fields) out << indent(2) << f.type << ' ' << f.name << ";\n";
        out << indent(1) << "}\n";
        break;
      }
      case MemberKind::Function: {
        const FunctionDef& f = ast.functions[m.index];
        out << indent(1) << "function " << f.name << "(" << params(f.params) << ")";
        if (!f.visibility.empty()) out << ' ' << f.visibility;
        for (const auto& mu : f.mutability) out << ' ' << mu;
        if (!f.returns.empty()) out << " returns (" << params(f.returns) << ")";
        out << " {\n";
        print_body(out, f.body, 2);
        out << indent(1) << "}\n";
        break;
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace factorscan::minisol
