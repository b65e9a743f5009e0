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

#include "factorscan/minisol/parser.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "factorscan/error.hpp"
#include "factorscan/minisol/semantic.hpp"
#include "lexer.hpp"

namespace factorscan::minisol {

using detail::Tok;
using detail::Token;

std::string to_json(const Diagnostic& d) {
  nlohmann::json j = {{"line", d.line}, {"code", d.code}, {"msg", d.msg}};
  return j.dump();
}

namespace {

struct Abort {
  Diagnostic diag;
};

[[noreturn]] void fail(int line, std::string code, std::string msg) {
  throw Abort{{line, std::move(code), std::move(msg)}};
}

const std::set<std::string, std::less<>> kUnsupportedStmt = {
    "for", "while", "do", "assembly", "try", "unchecked", "emit", "revert",
    "delete", "break", "continue", "throw", "new", "catch"};

const std::set<std::string, std::less<>> kUnsupportedMember = {
    "modifier", "event", "constructor", "receive", "fallback", "using", "enum", "error"};

const std::set<std::string, std::less<>> kVisibility = {"external", "public", "internal",
                                                        "private"};
const std::set<std::string, std::less<>> kMutability = {"view", "pure", "payable", "virtual",
                                                        "override", "nonpayable"};
const std::set<std::string, std::less<>> kStateModifiers = {"public", "private", "internal",
                                                            "constant", "immutable", "override"};
const std::set<std::string, std::less<>> kDataLocation = {"memory", "storage", "calldata"};
const std::set<std::string, std::less<>> kUnits = {"wei",     "gwei",  "ether", "seconds",
                                                   "minutes", "hours", "days",  "weeks"};

int binary_precedence(const std::string& op) {
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
  if (op == "**") return 11;
  return 0;
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks) : src_(src), t_(std::move(toks)) {}

  void run(Ast& ast) {
    ast_ = &ast;
    bool have_contract = false;
    while (peek().kind != Tok::End) {
      const Token& k = peek();
      if (k.kind == Tok::Punct && k.text == ";") {
        next();
        continue;
      }
      if (is("pragma")) {
        preamble_item(ast);
      } else if (is("import")) {
        import_item(ast);
      } else if (is("interface") || is("library")) {
        const Token& kw = next();
        const Token& name = expect_ident();
        warnings.push_back({kw.line, "LocalInterface",
                            kw.text + " '" + name.text + "' declared locally; body skipped"});
        ast.external_types.push_back(name.text);
        skip_balanced_braces();
      } else if (is("contract")) {
        if (have_contract) fail(k.line, "MultipleContracts", "exactly one contract per unit");
        have_contract = true;
        contract(ast);
      } else if (is("abstract")) {
        fail(k.line, "UnsupportedConstruct", "abstract contracts are not supported");
      } else {
        fail(k.line, "UnexpectedToken", "unexpected '" + k.text + "' at top level");
      }
    }
    if (!have_contract) fail(peek().line, "NoContract", "no contract definition found");
  }

  std::vector<Diagnostic> warnings;
  std::vector<std::pair<int, const Stmt*>> stmt_starts;  // filled after parse

 private:
  // ---- token helpers ------------------------------------------------------
  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, t_.size() - 1);
    return t_[i];
  }
  const Token& next() {
    const Token& t = t_[pos_];
    if (pos_ + 1 < t_.size()) ++pos_;
    return t;
  }
  bool is(std::string_view text, std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind != Tok::End && t.kind != Tok::String && t.text == text;
  }
  bool accept(std::string_view text) {
    if (is(text)) {
      next();
      return true;
    }
    return false;
  }
  const Token& expect(std::string_view text) {
    if (!is(text))
      fail(peek().line, "UnexpectedToken",
           "expected '" + std::string(text) + "' but found '" + peek().text + "'");
    return next();
  }
  const Token& expect_ident() {
    if (peek().kind != Tok::Ident)
      fail(peek().line, "UnexpectedToken", "expected identifier but found '" + peek().text + "'");
    return next();
  }

  void skip_balanced_braces() {
    while (!is("{")) {
      if (peek().kind == Tok::End) fail(peek().line, "UnexpectedEof", "missing '{'");
      next();
    }
    int depth = 0;
    do {
      if (peek().kind == Tok::End) fail(peek().line, "UnexpectedEof", "unbalanced braces");
      if (is("{")) ++depth;
      if (is("}")) --depth;
      next();
    } while (depth > 0);
  }

  std::string raw_until_semicolon(int& line) {
    const Token& first = peek();
    line = first.line;
    std::size_t begin = first.begin;
    while (!is(";")) {
      if (peek().kind == Tok::End) fail(line, "UnexpectedEof", "missing ';'");
      next();
    }
    std::size_t end = next().end;
    return std::string(src_.substr(begin, end - begin));
  }

  // ---- top level ----------------------------------------------------------
  void preamble_item(Ast& ast) {
    int line = 0;
    std::string text = raw_until_semicolon(line);
    ast.preamble.push_back({line, text});
  }

  void import_item(Ast& ast) {
    std::size_t start = pos_;
    int line = 0;
    std::string text = raw_until_semicolon(line);
    ast.preamble.push_back({line, text});
    // Import paths name their type after the file base name; brace imports
    // list their symbols explicitly.
    bool braces = false;
    for (std::size_t i = start; i < pos_; ++i) {
      const Token& t = t_[i];
      if (t.kind == Tok::Punct && t.text == "{") braces = true;
      if (t.kind == Tok::Punct && t.text == "}") braces = false;
      if (braces && t.kind == Tok::Ident) ast.external_types.push_back(t.text);
      if (t.kind == Tok::String && !braces) {
        std::string path = t.text.substr(1, t.text.size() - 2);
        auto slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        if (auto dot = base.find('.'); dot != std::string::npos) base = base.substr(0, dot);
        if (!base.empty()) ast.external_types.push_back(base);
      }
    }
  }

  void contract(Ast& ast) {
    const Token& kw = expect("contract");
    ast.contract_line = kw.line;
    ast.contract_name = expect_ident().text;
    if (is("is")) fail(peek().line, "UnsupportedConstruct", "inheritance is not supported");
    expect("{");
    while (!is("}")) {
      if (peek().kind == Tok::End) fail(peek().line, "UnexpectedEof", "unterminated contract");
      member(ast);
    }
    ast.contract_close_line = next().line;
  }

  void member(Ast& ast) {
    const Token& k = peek();
    if (k.kind == Tok::Ident && kUnsupportedMember.count(k.text))
      fail(k.line, "UnsupportedConstruct", "'" + k.text + "' is not supported");
    if (is("struct")) {
      StructDef s;
      s.line = next().line;
      s.name = expect_ident().text;
      expect("{");
      while (!accept("}")) {
        Param p;
        p.type = type_name();
        p.name = expect_ident().text;
        expect(";");
        s.fields.push_back(p);
      }
      ast.member_order.push_back({MemberKind::Struct, ast.structs.size()});
      ast.structs.push_back(std::move(s));
      return;
    }
    if (is("function")) {
      function(ast);
      return;
    }
    VarDecl v;
    v.line = k.line;
    v.type = type_name();
    while (peek().kind == Tok::Ident && kStateModifiers.count(peek().text))
      v.modifiers.push_back(next().text);
    v.name = expect_ident().text;
    if (accept("=")) v.init = expression();
    expect(";");
    ast.member_order.push_back({MemberKind::StateVar, ast.state_vars.size()});
    ast.state_vars.push_back(std::move(v));
  }

  std::vector<Param> param_list() {
    std::vector<Param> ps;
    expect("(");
    if (accept(")")) return ps;
    for (;;) {
      Param p;
      p.type = type_name();
      if (peek().kind == Tok::Ident && kDataLocation.count(peek().text))
        p.type += " " + next().text;
      if (peek().kind == Tok::Ident) p.name = next().text;
      ps.push_back(std::move(p));
      if (accept(")")) break;
      expect(",");
    }
    return ps;
  }

  void function(Ast& ast) {
    FunctionDef fn;
    fn.line = expect("function").line;
    fn.name = expect_ident().text;
    fn.params = param_list();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) break;
      if (kVisibility.count(t.text)) {
        fn.visibility = next().text;
      } else if (kMutability.count(t.text)) {
        fn.mutability.push_back(next().text);
      } else if (t.text == "returns") {
        next();
        fn.returns = param_list();
      } else {
        fail(t.line, "UnsupportedConstruct", "modifier invocation '" + t.text + "' is not supported");
      }
    }
    if (accept(";")) {
      fn.close_line = fn.line;
    } else {
      expect("{");
      fn.body = block_body();
      fn.close_line = next().line;  // '}'
    }
    ast.member_order.push_back({MemberKind::Function, ast.functions.size()});
    ast.functions.push_back(std::move(fn));
  }

  // ---- types --------------------------------------------------------------
  std::string type_name() {
    std::string out;
    if (is("mapping")) {
      next();
      expect("(");
      std::string k = type_name();
      expect("=>");
      std::string v = type_name();
      expect(")");
      out = "mapping(" + k + " => " + v + ")";
    } else {
      out = expect_ident().text;
      while (is(".") && peek(1).kind == Tok::Ident) {
        next();
        out += "." + next().text;
      }
      if (out == "address" && is("payable")) {
        next();
        out = "address payable";
      }
    }
    while (is("[")) {
      next();
      if (peek().kind == Tok::Number) {
        out += "[" + next().text + "]";
      } else {
        out += "[]";
      }
      expect("]");
    }
    return out;
  }

  // Lookahead: does a local variable declaration start here?
  bool looks_like_declaration() const {
    const Token& a = peek();
    if (a.kind != Tok::Ident) return false;
    if (a.text == "mapping") return true;
    if (is_elementary_type_name(a.text) && a.text != "payable") {
      return !is("(", 1);
    }
    const Token& b = peek(1);
    if (b.kind == Tok::Ident) return true;  // UserType name / UserType storage name
    if (is("[", 1)) {
      std::size_t k = 2;
      if (peek(k).kind == Tok::Number) ++k;
      if (!is("]", k)) return false;
      ++k;
      while (is("[", k)) {
        ++k;
        if (peek(k).kind == Tok::Number) ++k;
        if (!is("]", k)) return false;
        ++k;
      }
      return peek(k).kind == Tok::Ident;
    }
    return false;
  }

  // ---- statements ---------------------------------------------------------
  std::vector<Stmt> block_body() {
    std::vector<Stmt> out;
    while (!is("}")) {
      if (peek().kind == Tok::End) fail(peek().line, "UnexpectedEof", "unterminated block");
      out.push_back(statement());
    }
    return out;
  }

  Stmt statement() {
    const Token& k = peek();
    if (k.kind == Tok::Ident && kUnsupportedStmt.count(k.text))
      fail(k.line, "UnsupportedConstruct", "'" + k.text + "' is not supported");
    if (is("{")) fail(k.line, "UnsupportedConstruct", "nested blocks are not supported");
    Stmt s;
    s.line = k.line;
    if (is("if")) return if_statement();
    if (is("require")) {
      next();
      s.kind = StmtKind::Require;
      expect("(");
      s.value = expression();
      if (accept(",")) s.message = expression();
      expect(")");
      expect(";");
      return s;
    }
    if (is("return")) {
      next();
      s.kind = StmtKind::Return;
      if (!is(";")) s.value = expression();
      expect(";");
      return s;
    }
    if (is("(") && tuple_assignment_ahead()) {
      tuple_statement(s);
      return s;
    }
    if (looks_like_declaration()) {
      s.kind = StmtKind::VarDecl;
      s.decl_type = type_name();
      if (peek().kind == Tok::Ident && kDataLocation.count(peek().text))
        s.decl_type += " " + next().text;
      s.target = make_ident(expect_ident().text);
      if (accept("=")) s.value = expression();
      expect(";");
      return s;
    }
    ExprRef e = expression();
    if (is("=") || is("+=") || is("-=")) {
      std::string op = next().text;
      require_lvalue(e, s.line);
      s.kind = StmtKind::Assign;
      s.target = e;
      s.op = op == "=" ? AssignOp::Plain : op == "+=" ? AssignOp::PlusAssign : AssignOp::MinusAssign;
      s.value = expression();
    } else if (is("++") || is("--")) {
      bool inc = next().text == "++";
      require_lvalue(e, s.line);
      s.kind = StmtKind::Assign;
      s.target = e;
      s.op = inc ? AssignOp::PlusAssign : AssignOp::MinusAssign;
      s.value = make_literal(ExprKind::Number, "1");
    } else if (peek().kind == Tok::Punct && peek().text.size() >= 2 && peek().text.back() == '=' &&
               peek().text != "==" && peek().text != "!=" && peek().text != "<=" &&
               peek().text != ">=") {
      fail(peek().line, "UnsupportedConstruct",
           "compound assignment '" + peek().text + "' is not supported");
    } else {
      s.kind = StmtKind::Expr;
      s.value = e;
    }
    expect(";");
    return s;
  }

  void require_lvalue(const ExprRef& e, int line) {
    const Expr* p = e.get();
    while (p->kind == ExprKind::Member || p->kind == ExprKind::Index) p = p->children[0].get();
    if (p->kind != ExprKind::Ident) fail(line, "InvalidLvalue", "assignment target is not a path");
  }

  bool tuple_assignment_ahead() const {
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const Token& t = peek(k);
      if (t.kind == Tok::End) return false;
      if (t.kind == Tok::Punct && t.text == "(") ++depth;
      if (t.kind == Tok::Punct && t.text == ")") {
        if (--depth == 0) return is("=", k + 1);
      }
      if (t.kind == Tok::Punct && t.text == ";") return false;
    }
  }

  void tuple_statement(Stmt& s) {
    expect("(");
    bool typed = false;
    for (;;) {
      TupleSlot slot;
      if (!is(",") && !is(")")) {
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Ident &&
            !kDataLocation.count(peek(1).text)) {
          slot.type = type_name();
          slot.name = expect_ident().text;
        } else if (peek().kind == Tok::Ident &&
                   (peek(1).kind == Tok::Ident || is("[", 1))) {
          slot.type = type_name();
          if (peek().kind == Tok::Ident && kDataLocation.count(peek().text))
            slot.type += " " + next().text;
          slot.name = expect_ident().text;
        } else {
          slot.name = expect_ident().text;
        }
        typed = typed || !slot.type.empty();
      }
      s.tuple.push_back(slot);
      if (accept(")")) break;
      expect(",");
    }
    expect("=");
    s.kind = typed ? StmtKind::VarDecl : StmtKind::Assign;
    s.value = expression();
    expect(";");
  }

  Stmt if_statement() {
    Stmt s;
    s.kind = StmtKind::If;
    s.line = expect("if").line;
    expect("(");
    s.value = expression();
    expect(")");
    s.then_body = branch_body(s.close_line);
    if (is("else")) {
      s.has_else = true;
      s.else_line = next().line;
      if (is("if")) {
        s.else_body.push_back(if_statement());
      } else {
        int close = 0;
        s.else_body = branch_body(close);
      }
    }
    return s;
  }

  std::vector<Stmt> branch_body(int& close_line) {
    if (accept("{")) {
      auto body = block_body();
      close_line = next().line;
      return body;
    }
    std::vector<Stmt> body;
    body.push_back(statement());
    close_line = 0;
    return body;
  }

  // ---- expressions --------------------------------------------------------
  ExprRef expression() {
    ExprRef e = binary(1);
    if (is("?")) fail(peek().line, "UnsupportedConstruct", "ternary expressions are not supported");
    return e;
  }

  ExprRef binary(int min_prec) {
    ExprRef lhs = unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Punct) break;
      int p = binary_precedence(t.text);
      if (p == 0 || p < min_prec) break;
      std::string op = next().text;
      ExprRef rhs = op == "**" ? binary(p) : binary(p + 1);
      lhs = make_binary(op, lhs, rhs);
    }
    return lhs;
  }

  ExprRef unary() {
    if (is("!") || is("-") || is("~")) {
      std::string op = next().text;
      return make_unary(op, unary());
    }
    if (is("++") || is("--"))
      fail(peek().line, "UnsupportedConstruct", "prefix increment is not supported");
    if (is("new")) fail(peek().line, "UnsupportedConstruct", "'new' is not supported");
    return postfix(primary());
  }

  ExprRef primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        std::string text = next().text;
        if (peek().kind == Tok::Ident && kUnits.count(peek().text)) text += " " + next().text;
        return make_literal(ExprKind::Number, text);
      }
      case Tok::String: return make_literal(ExprKind::String, next().text);
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") return make_literal(ExprKind::Bool, next().text);
        if (kUnsupportedStmt.count(t.text))
          fail(t.line, "UnsupportedConstruct", "'" + t.text + "' is not supported");
        std::string name = next().text;
        if (name == "address" && is("payable")) {
          next();
          name = "address payable";
        }
        return make_ident(name);
      }
      case Tok::Punct:
        if (t.text == "(") {
          next();
          ExprRef e = expression();
          if (is(","))
            fail(peek().line, "UnsupportedConstruct", "tuple expressions are not supported");
          expect(")");
          return e;
        }
        if (t.text == "[")
          fail(t.line, "UnsupportedConstruct", "inline array literals are not supported");
        break;
      case Tok::End: fail(t.line, "UnexpectedEof", "unexpected end of input");
    }
    fail(t.line, "UnexpectedToken", "unexpected '" + t.text + "' in expression");
  }

  ExprRef postfix(ExprRef e) {
    for (;;) {
      if (is(".")) {
        next();
        e = make_member(e, expect_ident().text);
      } else if (is("[")) {
        int line = next().line;
        if (is("]")) fail(line, "UnsupportedConstruct", "empty index expression");
        ExprRef idx = expression();
        expect("]");
        e = make_index(e, idx);
      } else if (is("(")) {
        e = make_call(e, arguments());
      } else if (is("{") && peek(1).kind == Tok::Ident && is(":", 2)) {
        next();
        std::vector<CallOption> opts;
        for (;;) {
          CallOption o;
          o.name = expect_ident().text;
          expect(":");
          o.value = expression();
          opts.push_back(std::move(o));
          if (accept("}")) break;
          expect(",");
        }
        if (!is("(")) fail(peek().line, "UnexpectedToken", "call options must precede '('");
        e = make_call(e, arguments(), std::move(opts));
      } else {
        return e;
      }
    }
  }

  std::vector<ExprRef> arguments() {
    expect("(");
    std::vector<ExprRef> args;
    if (accept(")")) return args;
    if (is("{")) fail(peek().line, "UnsupportedConstruct", "named arguments are not supported");
    for (;;) {
      args.push_back(expression());
      if (accept(")")) break;
      expect(",");
    }
    return args;
  }

  std::string_view src_;
  std::vector<Token> t_;
  std::size_t pos_ = 0;
  Ast* ast_ = nullptr;
};

// ---------------------------------------------------------------------------
// Post-parse semantic pass: external call discovery and statement kinds.
// ---------------------------------------------------------------------------

bool contains_external_call(const Scope& scope, const ExprRef& e) {
  return !external_calls(scope, e).empty();
}

// A call whose receiver itself performs an external call is a chained call.
void reject_chained(const Scope& scope, const ExprRef& e, int line) {
  if (!e) return;
  if (e->kind == ExprKind::Call && e->children[0]->kind == ExprKind::Member) {
    const ExprRef& recv = e->children[0]->children[0];
    if (contains_external_call(scope, recv) && scope.classify_call(e))
      fail(line, "NestedExternalCall", "chained external call");
  }
  for (const auto& k : e->children) reject_chained(scope, k, line);
  for (const auto& o : e->options) reject_chained(scope, o.value, line);
}

void annotate(Scope& scope, std::vector<Stmt>& body) {
  for (Stmt& s : body) {
    std::vector<CallSite> calls;
    for (const ExprRef* e : {&s.target, &s.value, &s.message}) {
      if (!*e) continue;
      reject_chained(scope, *e, s.line);
      auto c = external_calls(scope, *e);
      calls.insert(calls.end(), c.begin(), c.end());
    }
    if (calls.size() > 1)
      fail(s.line, "NestedExternalCall",
           std::to_string(calls.size()) + " external calls in one statement");
    if (calls.size() == 1) {
      s.call = calls.front();
      bool whole = s.value && s.value.get() == calls.front().call.get();
      bool capture_ok = s.kind == StmtKind::Expr || s.kind == StmtKind::VarDecl ||
                        (s.kind == StmtKind::Assign && s.op == AssignOp::Plain);
      if (whole && capture_ok) s.kind = StmtKind::ExternalCall;
    }
    if (!s.decl_type.empty() && s.target) scope.declare_local(s.target->text, s.decl_type);
    for (const auto& slot : s.tuple)
      if (!slot.type.empty()) scope.declare_local(slot.name, slot.type);
    if (s.kind == StmtKind::If) {
      annotate(scope, s.then_body);
      annotate(scope, s.else_body);
    }
  }
}

void collect_starts(const std::vector<Stmt>& body, std::vector<std::pair<int, const Stmt*>>& out,
                    const Stmt* parent) {
  for (const Stmt& s : body) {
    out.push_back({s.line, &s});
    if (s.kind == StmtKind::If) {
      collect_starts(s.then_body, out, &s);
      collect_starts(s.else_body, out, &s);
    }
  }
  (void)parent;
}

Stmt* find_stmt_at(std::vector<Stmt>& body, int line) {
  for (Stmt& s : body) {
    if (s.line == line) return &s;
    if (s.kind == StmtKind::If) {
      if (Stmt* t = find_stmt_at(s.then_body, line)) return t;
      if (Stmt* t = find_stmt_at(s.else_body, line)) return t;
    }
  }
  return nullptr;
}

// Flags code after a statement that always returns.
bool always_returns(const std::vector<Stmt>& body);

bool stmt_always_returns(const Stmt& s) {
  if (s.kind == StmtKind::Return) return true;
  if (s.kind == StmtKind::If && s.has_else)
    return always_returns(s.then_body) && always_returns(s.else_body);
  return false;
}

bool always_returns(const std::vector<Stmt>& body) {
  return std::any_of(body.begin(), body.end(), stmt_always_returns);
}

void dead_code_warnings(const std::vector<Stmt>& body, std::vector<Diagnostic>& out) {
  bool dead = false;
  for (const Stmt& s : body) {
    if (dead) {
      out.push_back({s.line, "DeadCode", "statement is unreachable"});
      break;
    }
    if (s.kind == StmtKind::If) {
      dead_code_warnings(s.then_body, out);
      dead_code_warnings(s.else_body, out);
    }
    dead = stmt_always_returns(s);
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (;;) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string normalize_newlines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

ParseResult parse(std::string_view source) {
  ParseResult r;
  r.unit.text = normalize_newlines(source);
  r.unit.lines = split_lines(r.unit.text);
  auto lexed = detail::lex(r.unit.text);
  if (lexed.error_line) {
    r.errors.push_back({lexed.error_line, "LexError", lexed.error});
    return r;
  }
  Parser p(r.unit.text, lexed.tokens);
  try {
    p.run(r.ast);
    r.warnings = p.warnings;

    // Preamble comments (SPDX and friends) sit before the contract keyword.
    for (const auto& c : lexed.comments) {
      if (c.line >= r.ast.contract_line || parse_anchor(c.text)) continue;
      r.ast.preamble.push_back({c.line, c.text});
    }
    std::stable_sort(r.ast.preamble.begin(), r.ast.preamble.end(),
                     [](const PreambleLine& a, const PreambleLine& b) { return a.line < b.line; });

    Scope scope(r.ast);
    int visible = 0;
    for (auto& fn : r.ast.functions) {
      scope.enter_function(fn);
      annotate(scope, fn.body);
      dead_code_warnings(fn.body, r.warnings);
      if (fn.externally_visible()) ++visible;
    }
    if (visible > 1)
      r.warnings.push_back({r.ast.contract_line, "MultipleExternalFunctions",
                            std::to_string(visible) + " externally visible functions"});

    // One statement per line. The braceless `return` body of an `if` on the
    // same line is the single tolerated exception.
    std::vector<std::pair<int, const Stmt*>> starts;
    for (const auto& fn : r.ast.functions) collect_starts(fn.body, starts, nullptr);
    std::map<int, std::vector<const Stmt*>> by_line;
    for (auto& [line, s] : starts) by_line[line].push_back(s);
    for (auto& [line, ss] : by_line) {
      if (ss.size() == 1) continue;
      bool exempt = ss.size() == 2 && ss[0]->kind == StmtKind::If &&
                    ss[1]->kind == StmtKind::Return && ss[0]->then_body.size() == 1 &&
                    &ss[0]->then_body[0] == ss[1];
      if (!exempt) fail(line, "MultiStatementLine", "more than one statement on a line");
    }

    // Anchor binding: an anchor comment occupies a whole line and binds the
    // statement starting on the very next line.
    for (const auto& c : lexed.comments) {
      if (c.block) continue;
      auto kind = parse_anchor(c.text);
      if (!kind) continue;
      const std::string& raw = r.unit.line(c.line);
      if (auto pos = raw.find_first_not_of(" \t"); pos == std::string::npos || raw.compare(pos, c.text.size(), c.text) != 0)
        continue;  // trailing comment after code, not an anchor line
      int target = c.line + 1;
      Stmt* s = nullptr;
      for (auto& fn : r.ast.functions)
        if ((s = find_stmt_at(fn.body, target))) break;
      if (!s) fail(c.line, "DanglingAnchor",
                   std::string(anchor_spelling(*kind)) + " is not followed by a statement");
      s->anchor = *kind;
      r.unit.anchors[c.line] = Anchor{*kind, target};
    }
  } catch (const Abort& a) {
    r.errors.push_back(a.diag);
  }
  return r;
}

ParseResult parse_or_throw(std::string_view source) {
  ParseResult r = parse(source);
  if (!r.ok()) {
    const Diagnostic& d = r.errors.front();
    throw Error(d.code, "line " + std::to_string(d.line) + ": " + d.msg);
  }
  return r;
}

}  // namespace factorscan::minisol
