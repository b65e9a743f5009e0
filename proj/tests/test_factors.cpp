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

#include "factorscan/datagen/corpus.hpp"
#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/factors/oracle.hpp"
#include "factorscan/factors/program.hpp"
#include "test_util.hpp"

using namespace factorscan;
using factorscan::test::read_data;

namespace {

std::string wrap(const std::string& body, const std::string& params = "address a, uint256 v") {
  return "import \"@openzeppelin/contracts/token/ERC20/IERC20.sol\";\n"  // 1
         "contract C {\n"                                                // 2
         "    IERC20 public t;\n"                                        // 3
         "    mapping(address => uint256) public ledger;\n"              // 4
         "    uint256 public total;\n"                                   // 5
         "    function f(" + params + ") external {\n"                   // 6
         + body +                                                        // 7..
         "    }\n}\n";
}

std::vector<int> set_lines(const BitVector& v) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i)) out.push_back(static_cast<int>(i) + 1);
  return out;
}

// (line c, line u), 1-based
int D(const FactorSet& fs, int c, int u) { return fs.phi_D(c - 1, u - 1); }
int O(const FactorSet& fs, int c, int u) { return fs.phi_O(c - 1, u - 1); }
DepKind K(const FactorSet& fs, int c, int u) { return static_cast<DepKind>(fs.dep_kind(c - 1, u - 1)); }

}  // namespace

TEST(ExternalCalls, TwoCallFixture) {
  const auto fs = analyze(build_program(read_data("two_calls.sol")));
  EXPECT_EQ(set_lines(fs.phi_E), (std::vector<int>{4, 7}));
  EXPECT_EQ(set_lines(fs.phi_S), std::vector<int>{});
}

TEST(ExternalCalls, BatchTransferStatement) {
  const auto p = build_program(wrap("        t.safeBatchTransferFrom(a, a, ids, values, \"\");\n",
                                    "address a, uint256[] memory ids, uint256[] memory values"));
  EXPECT_EQ(set_lines(external_call_units(p)), std::vector<int>{7});
}

TEST(StateUpdates, NestedMappingAndBranchWrites) {
  const auto p = build_program(wrap(
      "        ledger[a] -= v;\n"
      "        if (v > 2) {\n"
      "            total = v;\n"
      "        }\n"
      "        uint256 local = v;\n"));
  EXPECT_EQ(set_lines(state_update_units(p)), (std::vector<int>{7, 9}));
}

TEST(Dependency, DirectThroughCapturedReturn) {
  const auto fs = analyze(build_program(wrap(
      "        uint256 r = t.balanceOf(a);\n"
      "        ledger[a] = r;\n")));
  EXPECT_EQ(D(fs, 7, 8), 1);
  EXPECT_EQ(K(fs, 7, 8), DepKind::Direct);
  EXPECT_EQ(O(fs, 7, 8), -1);
}

TEST(Dependency, DisjointVariablesAreIndependent) {
  const auto fs = analyze(build_program(wrap(
      "        t.transfer(a, v);\n"
      "        total = 7;\n")));
  EXPECT_EQ(fs.phi_E(6), 1);
  EXPECT_EQ(fs.phi_S(7), 1);
  EXPECT_EQ(fs.phi_D.cast<int>().sum(), 0);
  EXPECT_EQ(K(fs, 7, 8), DepKind::None);
  EXPECT_EQ(O(fs, 7, 8), 0);
}

TEST(Dependency, IndirectThroughTransformedLocal) {
  const auto fs = analyze(build_program(wrap(
      "        uint256 r = t.balanceOf(a);\n"
      "        uint256 fee = r * 3;\n"
      "        total = fee;\n")));
  EXPECT_EQ(D(fs, 7, 9), 1);
  EXPECT_EQ(K(fs, 7, 9), DepKind::Indirect);
}

TEST(Dependency, ControlOnlyFixture) {
  const auto fs = analyze(build_program(read_data("branch_update.sol")));
  EXPECT_EQ(D(fs, 6, 8), 1);
  EXPECT_EQ(K(fs, 6, 8), DepKind::Ctrl);
}

TEST(Dependency, SharedCallInputWinsOverControl) {
  // The update reads the call's own arguments, so DIRECT takes priority.
  const auto fs = analyze(build_program(wrap(
      "        bool ok = t.transfer(a, v);\n"
      "        if (ok) {\n"
      "            ledger[a] += v;\n"
      "        }\n")));
  EXPECT_EQ(K(fs, 7, 9), DepKind::Direct);
}

TEST(Dependency, DataOnlyAblationDropsControl) {
  AnalysisOptions opt;
  opt.data_only = true;
  const auto fs = analyze(build_program(read_data("branch_update.sol")), opt);
  EXPECT_EQ(D(fs, 6, 8), 0);
}

TEST(Ordering, ChecksEffectsInteractions) {
  const auto fs = analyze(build_program(read_data("cei_ok.sol")));
  EXPECT_EQ(D(fs, 8, 7), 1);
  EXPECT_EQ(O(fs, 8, 7), 1);
}

TEST(Ordering, CallBeforeUpdate) {
  const auto fs = analyze(build_program(read_data("withdraw.sol")));
  EXPECT_EQ(D(fs, 8, 10), 1);
  EXPECT_EQ(O(fs, 8, 10), -1);
}

TEST(Ordering, PathSensitiveRiskDominates) {
  const auto fs = analyze(build_program(read_data("diamond.sol")));
  EXPECT_EQ(O(fs, 8, 7), 1);
  EXPECT_EQ(O(fs, 10, 11), -1);
}

TEST(Ordering, OverwrittenUpdateIsNeitherOrder) {
  // The cached value written by the update is overwritten before the call.
  const auto fs = analyze(build_program(wrap(
      "        total = v;\n"
      "        total = 3;\n"
      "        t.transfer(a, total);\n")));
  EXPECT_EQ(D(fs, 9, 7), 0);
  EXPECT_EQ(D(fs, 9, 8), 1);
  EXPECT_EQ(O(fs, 9, 8), 1);
}

TEST(Ordering, PairCellMerging) {
  detail::PairCell cell;
  cell.add(DepKind::Ctrl, +1);
  cell.add(DepKind::Direct, -1);
  EXPECT_EQ(cell.kind, DepKind::Direct);
  EXPECT_EQ(cell.phi_O(), -1);
  detail::PairCell clobbered;
  clobbered.add(DepKind::Indirect, 0);
  EXPECT_EQ(clobbered.phi_O(), 0);
}

TEST(FactorSet, InvariantsHoldOnFixtures) {
  for (const char* f : {"withdraw.sol", "cei_ok.sol", "two_calls.sol", "branch_update.sol", "diamond.sol",
                        "early_return.sol"}) {
    SCOPED_TRACE(f);
    const auto fs = analyze(build_program(read_data(f)));
    EXPECT_TRUE(fs.invariant_violations().empty());
  }
}

TEST(FactorSet, CorruptedSetReportsViolations) {
  auto fs = FactorSet::zeros(3);
  fs.phi_D(0, 1) = 1;  // no call at 0, no update at 1
  fs.phi_O(2, 2) = 1;
  EXPECT_GE(fs.invariant_violations().size(), 2u);
}

TEST(Oracle, AgreesOnFixtures) {
  for (const char* f : {"withdraw.sol", "cei_ok.sol", "two_calls.sol", "branch_update.sol", "diamond.sol",
                        "early_return.sol"}) {
    SCOPED_TRACE(f);
    const auto p = build_program(read_data(f));
    EXPECT_TRUE(brute_force_oracle(p).same_factors(analyze(p)));
    AnalysisOptions opt;
    opt.data_only = true;
    EXPECT_TRUE(brute_force_oracle(p, opt).same_factors(analyze(p, opt)));
  }
}

TEST(Oracle, RefusesProgramsBeyondTheBound) {
  std::string body;
  for (int i = 0; i < 3; ++i) body += "        if (v > " + std::to_string(i) + ") {\n            total = v;\n        }\n";
  try {
    brute_force_oracle(build_program(wrap(body)));
    FAIL() << "expected TooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TooLarge");
  }
}

// Property: analytic == path enumeration on every generated task.
TEST(Oracle, AgreesOnGeneratedCorpora) {
  int checked = 0;
  for (auto task : {datagen::Task::E, datagen::Task::D, datagen::Task::O, datagen::Task::Full}) {
    datagen::CorpusConfig cfg;
    cfg.task = task;
    cfg.count = 80;
    cfg.seed = 17;
    for (const auto& s : datagen::gen_corpus(cfg).samples) {
      const auto p = build_program(s.source);
      SCOPED_TRACE(s.source);
      ASSERT_TRUE(brute_force_oracle(p).same_factors(analyze(p)));
      ++checked;
    }
  }
  EXPECT_EQ(checked, 320);
}
