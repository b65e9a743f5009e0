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

#include "factorscan/minisol/ast.hpp"

namespace factorscan::minisol {
namespace {

ExprRef make(Expr e) { return ExprRef(std::make_shared<const Expr>(std::move(e))); }

}  // namespace

ExprRef make_ident(std::string name) { return make({ExprKind::Ident, std::move(name), {}, {}}); }

ExprRef make_literal(ExprKind kind, std::string text) { return make({kind, std::move(text), {}, {}}); }

ExprRef make_member(ExprRef base, std::string name) {
  return make({ExprKind::Member, std::move(name), {std::move(base)}, {}});
}

ExprRef make_index(ExprRef base, ExprRef index) {
  return make({ExprKind::Index, "", {std::move(base), std::move(index)}, {}});
}

ExprRef make_call(ExprRef callee, std::vector<ExprRef> args, std::vector<CallOption> options) {
  std::vector<ExprRef> kids;
  kids.reserve(args.size() + 1);
  kids.push_back(std::move(callee));
  for (auto& a : args) kids.push_back(std::move(a));
  return make({ExprKind::Call, "", std::move(kids), std::move(options)});
}

ExprRef make_unary(std::string op, ExprRef operand) {
  return make({ExprKind::Unary, std::move(op), {std::move(operand)}, {}});
}

ExprRef make_binary(std::string op, ExprRef lhs, ExprRef rhs) {
  return make({ExprKind::Binary, std::move(op), {std::move(lhs), std::move(rhs)}, {}});
}

const char* to_string(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::ExtCall: return "ExtCall";
    case AnchorKind::StateUpd: return "StateUpd";
    case AnchorKind::Check: return "Check";
    case AnchorKind::Effect: return "Effect";
    case AnchorKind::Interaction: return "Interaction";
  }
  return "?";
}

const char* anchor_spelling(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::ExtCall: return "//e";
    case AnchorKind::StateUpd: return "//s";
    case AnchorKind::Check: return "//CHECK";
    case AnchorKind::Effect: return "//EFFECT";
    case AnchorKind::Interaction: return "//INTERACTION";
  }
  return "?";
}

const char* to_string(StmtKind kind) {
  switch (kind) {
    case StmtKind::VarDecl: return "VarDecl";
    case StmtKind::Assign: return "Assign";
    case StmtKind::Require: return "Require";
    case StmtKind::If: return "If";
    case StmtKind::Return: return "Return";
    case StmtKind::ExternalCall: return "ExternalCall";
    case StmtKind::Expr: return "Expr";
  }
  return "?";
}

const char* to_string(CallKind kind) {
  switch (kind) {
    case CallKind::HighLevel: return "HIGH_LEVEL_CALL";
    case CallKind::Call: return "CALL";
    case CallKind::LowLevel: return "LOW_LEVEL_CALL";
    case CallKind::DelegateCall: return "DELEGATECALL";
    case CallKind::StaticCall: return "STATICCALL";
  }
  return "?";
}

std::optional<AnchorKind> parse_anchor(std::string_view t) {
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.remove_suffix(1);
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
  if (t == "//e") return AnchorKind::ExtCall;
  if (t == "//s") return AnchorKind::StateUpd;
  if (t == "//CHECK") return AnchorKind::Check;
  if (t == "//EFFECT") return AnchorKind::Effect;
  if (t == "//INTERACTION") return AnchorKind::Interaction;
  return std::nullopt;
}

}  // namespace factorscan::minisol
