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


#include <gtest/gtest.h>

#include <algorithm>

#include "factorscan/error.hpp"
#include "factorscan/minisol/cfg.hpp"
#include "factorscan/minisol/defuse.hpp"
#include "factorscan/minisol/parser.hpp"
#include "factorscan/minisol/printer.hpp"
#include "test_util.hpp"

using namespace factorscan::minisol;
using factorscan::test::read_data;

namespace {

std::string wrap(const std::string& body, const std::string& params = "address a, uint256 v",
                 const std::string& state = "") {
  return "import \"@openzeppelin/contracts/token/ERC20/IERC20.sol\";\n"
         "contract C {\n"
         "    IERC20 public t;\n"
         "    mapping(address => uint256) public ledger;\n" +
         state + "    function f(" + params + ") external {\n" + body + "    }\n}\n";
}

const FunctionDef& only_fn(const ParseResult& r) {
  EXPECT_EQ(r.ast.functions.size(), 1u);
  return r.ast.functions.at(0);
}

std::vector<StmtKind> kinds(const std::vector<Stmt>& body) {
  std::vector<StmtKind> k;
  for (const auto& s : body) k.push_back(s.kind);
  return k;
}

}  // namespace

TEST(Parser, WithdrawFixtureStatementsAndAnchors) {
  const auto r = parse(read_data("withdraw.sol"));
  ASSERT_TRUE(r.ok()) << r.errors.front().msg;
  EXPECT_EQ(r.ast.contract_name, "Vault");
  ASSERT_EQ(r.ast.state_vars.size(), 1u);
  EXPECT_EQ(r.ast.state_vars[0].name, "credit");
  EXPECT_EQ(r.ast.state_vars[0].type, "mapping(address => uint256)");

  const auto& fn = only_fn(r);
  EXPECT_EQ(fn.name, "withdraw");
  EXPECT_EQ(fn.visibility, "external");
  ASSERT_EQ(fn.params.size(), 1u);
  EXPECT_EQ(fn.params[0].type, "uint256");
  EXPECT_EQ(fn.line, 5);
  EXPECT_EQ(fn.close_line, 11);
  EXPECT_EQ(kinds(fn.body), (std::vector<StmtKind>{StmtKind::Require, StmtKind::ExternalCall, StmtKind::Assign}));

  const auto& call = fn.body[1];
  EXPECT_EQ(call.line, 8);
  ASSERT_TRUE(call.call);
  EXPECT_EQ(call.call->kind, CallKind::LowLevel);
  ASSERT_EQ(call.tuple.size(), 2u);
  EXPECT_EQ(call.tuple[0].name, "success");
  EXPECT_EQ(call.tuple[1].name, "");
  EXPECT_EQ(call.anchor, AnchorKind::ExtCall);

  const auto& upd = fn.body[2];
  EXPECT_EQ(upd.line, 10);
  EXPECT_EQ(upd.op, AssignOp::MinusAssign);
  EXPECT_EQ(print_expr(upd.target), "credit[msg.sender]");
  EXPECT_EQ(upd.anchor, AnchorKind::StateUpd);

  ASSERT_EQ(r.unit.anchors.size(), 2u);
  EXPECT_EQ(r.unit.anchors.at(7).kind, AnchorKind::ExtCall);
  EXPECT_EQ(r.unit.anchors.at(7).target_line, 8);
  EXPECT_EQ(r.unit.anchors.at(9).kind, AnchorKind::StateUpd);
  EXPECT_EQ(r.unit.anchors.at(9).target_line, 10);
}

TEST(Parser, CompoundAssignmentOnNestedMapping) {
  const auto r = parse(wrap("        mainLedger[from][i] -= values[i];\n",
                            "address from, uint256 i, uint256[] memory values",
                            "    mapping(address => mapping(uint256 => uint256)) public mainLedger;\n"));
  ASSERT_TRUE(r.ok()) << r.errors.front().msg;
  const auto& s = only_fn(r).body.at(0);
  EXPECT_EQ(s.kind, StmtKind::Assign);
  EXPECT_EQ(s.op, AssignOp::MinusAssign);
  EXPECT_EQ(print_expr(s.target), "mainLedger[from][i]");
  EXPECT_EQ(print_expr(s.value), "values[i]");
}

TEST(Parser, PrintIsAFixedPoint) {
  for (const char* f : {"withdraw.sol", "cei_ok.sol", "two_calls.sol", "branch_update.sol", "diamond.sol",
                        "early_return.sol"}) {
    SCOPED_TRACE(f);
    const auto a = parse_or_throw(read_data(f));
    const std::string once = print(a.ast);
    const auto b = parse_or_throw(once);
    EXPECT_EQ(print(b.ast), once);
    ASSERT_EQ(a.ast.functions.size(), b.ast.functions.size());
    for (std::size_t i = 0; i < a.ast.functions.size(); ++i)
      EXPECT_EQ(flatten(a.ast.functions[i]).size(), flatten(b.ast.functions[i]).size());
  }
}

TEST(Parser, BracelessIfMatchesBracedIf) {
  const auto a = parse_or_throw(wrap("        if (v > 1)\n            ledger[a] = v;\n"));
  const auto b = parse_or_throw(wrap("        if (v > 1) {\n            ledger[a] = v;\n        }\n"));
  EXPECT_EQ(print(a.ast), print(b.ast));
}

TEST(Parser, OneStatementPerLine) {
  EXPECT_TRUE(parse(wrap("        if (v == 0) return;\n")).ok());
  const auto r = parse(wrap("        if (v > 1) ledger[a] = v;\n"));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].code, "MultiStatementLine");
}

TEST(Parser, ErrorsCarryCodesAndLines) {
  auto r = parse("contract X { function f( }");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].code, "UnexpectedToken");
  EXPECT_EQ(r.errors[0].line, 1);

  r = parse("pragma solidity ^0.8.20;\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].code, "NoContract");

  r = parse(wrap("        while (v > 0) { v -= 1; }\n"));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].code, "UnsupportedConstruct");

  EXPECT_THROW(parse_or_throw("contract"), factorscan::Error);
}

TEST(Parser, NestedExternalCallRejected) {
  const auto r = parse(wrap("        t.transfer(a, t.balanceOf(a));\n"));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].code, "NestedExternalCall");
}

TEST(Parser, DanglingAnchorIsReported) {
  const auto r = parse(wrap("        ledger[a] = v;\n        //e\n"));
  const bool flagged = std::any_of(r.errors.begin(), r.errors.end(), [](auto& d) { return d.code == "DanglingAnchor"; }) ||
                       std::any_of(r.warnings.begin(), r.warnings.end(), [](auto& d) { return d.code == "DanglingAnchor"; });
  EXPECT_TRUE(flagged);
}

TEST(Parser, CallKinds) {
  const auto r = parse_or_throw(wrap(
      "        t.transfer(a, v);\n"
      "        (bool ok, ) = a.call{value: v}(\"\");\n"
      "        (bool ok2, ) = a.delegatecall(\"\");\n"
      "        (bool ok3, ) = a.staticcall(\"\");\n"
      "        IERC20(a).approve(a, v);\n"));
  const auto& body = only_fn(r).body;
  ASSERT_EQ(body.size(), 5u);
  EXPECT_EQ(body[0].call->kind, CallKind::HighLevel);
  EXPECT_EQ(body[1].call->kind, CallKind::LowLevel);
  EXPECT_EQ(body[2].call->kind, CallKind::DelegateCall);
  EXPECT_EQ(body[3].call->kind, CallKind::StaticCall);
  EXPECT_EQ(body[4].call->kind, CallKind::HighLevel);
  EXPECT_EQ(body[4].call->method, "approve");
}

TEST(Cfg, IfElseHasFourBlocksAndTwoPaths) {
  const auto r = parse_or_throw(wrap(
      "        if (v > 1) {\n"
      "            ledger[a] = v;\n"
      "        } else {\n"
      "            ledger[a] = 0;\n"
      "        }\n"
      "        t.transfer(a, v);\n"));
  const auto g = build_cfg(only_fn(r));
  EXPECT_EQ(g.blocks.size(), 4u);  // condition, then, else, join
  EXPECT_EQ(g.count_paths(), 2);
}

TEST(Cfg, EarlyReturnHasTwoPaths) {
  const auto r = parse_or_throw(read_data("early_return.sol"));
  const auto g = build_cfg(only_fn(r));
  EXPECT_EQ(g.count_paths(), 2);
  const auto& stmts = g.stmt_succ;
  ASSERT_EQ(stmts.size(), 4u);  // if, return, decl, assign
  EXPECT_TRUE(std::all_of(g.reachable.begin(), g.reachable.end(), [](bool b) { return b; }));
}

TEST(Cfg, StraightLineHasOnePath) {
  const auto r = parse_or_throw(read_data("two_calls.sol"));
  const auto g = build_cfg(only_fn(r));
  EXPECT_EQ(g.count_paths(), 1);
  EXPECT_EQ(g.blocks.size(), 1u);
}

TEST(Cfg, DeadCodeAfterReturnIsUnreachable) {
  const auto r = parse(wrap("        return;\n        ledger[a] = v;\n"));
  ASSERT_TRUE(r.ok());
  const auto g = build_cfg(only_fn(r));
  ASSERT_EQ(g.reachable.size(), 2u);
  EXPECT_TRUE(g.reachable[0]);
  EXPECT_FALSE(g.reachable[1]);
}

TEST(DefUse, BalanceQueryCapture) {
  const auto r = parse_or_throw(wrap("        uint256 x = t.balanceOf(a);\n"));
  const auto du = build_defuse(r.ast, only_fn(r));
  const auto& s = du.stmts.at(0);
  EXPECT_EQ(s.reads, (std::set<VarPath>{"t", "a"}));
  EXPECT_EQ(s.writes, (std::set<VarPath>{"x"}));
  EXPECT_TRUE(s.state_writes.empty());
}

TEST(DefUse, LowLevelTupleCapture) {
  const auto r = parse_or_throw(wrap("        (bool success, ) = a.call{value: v}(\"\");\n"));
  const auto du = build_defuse(r.ast, only_fn(r));
  const auto& s = du.stmts.at(0);
  EXPECT_EQ(s.reads, (std::set<VarPath>{"a", "v"}));
  EXPECT_EQ(s.writes, (std::set<VarPath>{"success"}));
}

TEST(DefUse, IndexExpressionsAreKeysAndStateWritesAreRooted) {
  const auto r = parse_or_throw(wrap("        ledger[a] += v;\n"));
  const auto du = build_defuse(r.ast, only_fn(r));
  const auto& s = du.stmts.at(0);
  EXPECT_TRUE(s.keys.count("a"));
  EXPECT_TRUE(s.reads.count("v"));
  EXPECT_TRUE(s.reads.count("ledger[a]"));  // compound assignment reads its target
  EXPECT_EQ(s.state_writes, (std::set<VarPath>{"ledger[a]"}));
  EXPECT_EQ(path_root("ledger[a]"), "ledger");
}
