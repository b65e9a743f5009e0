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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factorscan::minisol {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind { Ident, Number, String, Bool, Member, Index, Call, Unary, Binary };

struct Expr;

/// Shared immutable expression handle with deep (structural) equality.
class ExprRef {
 public:
  ExprRef() = default;
  explicit ExprRef(std::shared_ptr<const Expr> p) : p_(std::move(p)) {}

  const Expr* get() const noexcept { return p_.get(); }
  const Expr& operator*() const noexcept { return *p_; }
  const Expr* operator->() const noexcept { return p_.get(); }
  explicit operator bool() const noexcept { return static_cast<bool>(p_); }

  friend bool operator==(const ExprRef& a, const ExprRef& b);

 private:
  std::shared_ptr<const Expr> p_;
};

struct CallOption {
  std::string name;
  ExprRef value;
  friend bool operator==(const CallOption&, const CallOption&) = default;
};

/// A single expression node. `text` holds the identifier, literal spelling,
/// member name or operator; `children` layout depends on `kind`:
///   Member: [base]            Index: [base, index]
///   Call:   [callee, args...] Unary: [operand]      Binary: [lhs, rhs]
struct Expr {
  ExprKind kind = ExprKind::Ident;
  std::string text;
  std::vector<ExprRef> children;
  std::vector<CallOption> options;  // call{value: v}

  friend bool operator==(const Expr&, const Expr&) = default;
};

inline bool operator==(const ExprRef& a, const ExprRef& b) {
  if (a.p_ == b.p_) return true;
  if (!a.p_ || !b.p_) return false;
  return *a.p_ == *b.p_;
}

ExprRef make_ident(std::string name);
ExprRef make_literal(ExprKind kind, std::string text);
ExprRef make_member(ExprRef base, std::string name);
ExprRef make_index(ExprRef base, ExprRef index);
ExprRef make_call(ExprRef callee, std::vector<ExprRef> args, std::vector<CallOption> options = {});
ExprRef make_unary(std::string op, ExprRef operand);
ExprRef make_binary(std::string op, ExprRef lhs, ExprRef rhs);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class AnchorKind { ExtCall, StateUpd, Check, Effect, Interaction };

enum class StmtKind { VarDecl, Assign, Require, If, Return, ExternalCall, Expr };

enum class AssignOp { Plain, PlusAssign, MinusAssign };

/// Classification of an external call site; names follow the opcode
/// vocabulary used by compiler-aware exports.
enum class CallKind { HighLevel, Call, LowLevel, DelegateCall, StaticCall };

/// One slot of a tuple-destructuring capture such as `(bool ok, ) = ...`.
/// An empty `name` is a skipped slot.
struct TupleSlot {
  std::string type;  // empty when assigning to an existing variable
  std::string name;
  friend bool operator==(const TupleSlot&, const TupleSlot&) = default;
};

/// The unique external call contained in a statement.
struct CallSite {
  CallKind kind = CallKind::HighLevel;
  ExprRef call;      // the Call node
  ExprRef receiver;  // target expression (e.g. `t`, `IERC20(a)`, `recipient`)
  std::string method;
  friend bool operator==(const CallSite&, const CallSite&) = default;
};

struct Stmt {
  StmtKind kind = StmtKind::Expr;
  int line = 0;
  std::optional<AnchorKind> anchor;

  std::string decl_type;          // local declaration type ("uint256", "bytes memory")
  ExprRef target;                 // assignment / declaration / capture target
  std::vector<TupleSlot> tuple;   // tuple capture, exclusive with `target`
  AssignOp op = AssignOp::Plain;
  ExprRef value;                  // rhs, require/if condition, return value, call
  ExprRef message;                // require(cond, message)

  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  bool has_else = false;
  int else_line = 0;
  int close_line = 0;

  std::optional<CallSite> call;

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct Param {
  std::string type;      // canonical type, including data location if any
  std::string name;
  friend bool operator==(const Param&, const Param&) = default;
};

struct VarDecl {
  std::string type;
  std::vector<std::string> modifiers;  // public, constant, immutable, ...
  std::string name;
  ExprRef init;
  int line = 0;
  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct StructDef {
  std::string name;
  std::vector<Param> fields;
  int line = 0;
  friend bool operator==(const StructDef&, const StructDef&) = default;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  std::string visibility;                 // external/public/internal/private or ""
  std::vector<std::string> mutability;    // view/pure/payable/virtual/override
  std::vector<Param> returns;
  std::vector<Stmt> body;
  int line = 0;
  int close_line = 0;

  bool externally_visible() const { return visibility == "external" || visibility == "public"; }
  friend bool operator==(const FunctionDef&, const FunctionDef&) = default;
};

enum class MemberKind { StateVar, Struct, Function };

struct MemberRef {
  MemberKind kind;
  std::size_t index;
  friend bool operator==(const MemberRef&, const MemberRef&) = default;
};

struct PreambleLine {
  int line = 0;
  std::string text;
  friend bool operator==(const PreambleLine&, const PreambleLine&) = default;
};

struct Ast {
  std::vector<PreambleLine> preamble;   // SPDX comment, pragma and import lines
  std::vector<std::string> external_types;  // interface names declared or imported
  std::string contract_name;
  int contract_line = 0;
  int contract_close_line = 0;
  std::vector<VarDecl> state_vars;
  std::vector<StructDef> structs;
  std::vector<FunctionDef> functions;
  std::vector<MemberRef> member_order;

  friend bool operator==(const Ast&, const Ast&) = default;
};

/// An anchor comment and the statement line it binds.
struct Anchor {
  AnchorKind kind;
  int target_line = 0;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct SourceUnit {
  std::string text;
  std::vector<std::string> lines;     // lines[0] is line 1
  std::map<int, Anchor> anchors;      // keyed by the anchor's own line

  const std::string& line(int n) const { return lines.at(static_cast<std::size_t>(n - 1)); }
};

const char* to_string(AnchorKind kind);
const char* anchor_spelling(AnchorKind kind);
const char* to_string(StmtKind kind);
const char* to_string(CallKind kind);
std::optional<AnchorKind> parse_anchor(std::string_view trimmed_line);

}  // namespace factorscan::minisol
