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

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/factors/program.hpp"
#include "factorscan/scoring/scoring.hpp"
#include "test_util.hpp"

using namespace factorscan;

namespace {

// Values written by tests/oracles/scoring_reference.py at 50 digits.
nlohmann::json reference() {
  std::ifstream in(std::string(FACTORSCAN_ORACLE_DIR) + "/scoring_reference.json");
  return nlohmann::json::parse(in);
}

double ref(const char* key) { return reference().at(key).get<double>(); }

// n units, candidate pairs (c, u, phi_O) all dependent.
FactorSet pairs(int n, std::initializer_list<std::tuple<int, int, int>> cu) {
  auto fs = FactorSet::zeros(n);
  for (auto [c, u, o] : cu) {
    fs.phi_E(c) = 1;
    fs.phi_S(u) = 1;
    fs.phi_D(c, u) = 1;
    fs.phi_O(c, u) = static_cast<std::int8_t>(o);
  }
  return fs;
}

constexpr double kTol = 1e-9;

}  // namespace

TEST(SoftOrder, MatchesReference) {
  EXPECT_NEAR(soft_order(-1, 4), ref("soft_order_minus1_alpha4"), kTol);
  EXPECT_NEAR(soft_order(+1, 4), ref("soft_order_plus1_alpha4"), kTol);
  for (double a : {0.5, 1.0, 4.0, 20.0}) EXPECT_NEAR(soft_order(-1, a) + soft_order(1, a), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(soft_order(0, 4), 0.5);
}

TEST(SoftScore, SinglePairMatchesReference) {
  const auto s = soft_score(pairs(2, {{0, 1, -1}}));
  EXPECT_EQ(s.candidates, 1u);
  EXPECT_NEAR(s.raw_f, ref("single_pair_raw"), kTol);
  EXPECT_NEAR(s.centered_f, ref("single_pair_centered"), kTol);
  EXPECT_NEAR(predict(s), ref("predict_single_pair"), kTol);
}

TEST(SoftScore, TwoPairsMatchReference) {
  // one call, two updates: exactly two candidate pairs
  const auto s = soft_score(pairs(3, {{0, 1, -1}, {0, 2, +1}}));
  EXPECT_EQ(s.candidates, 2u);
  EXPECT_NEAR(s.raw_f, ref("two_pair_raw"), kTol);
  EXPECT_NEAR(s.centered_f, ref("two_pair_centered"), kTol);
}

TEST(Predict, CenteredZeroIsNegative) {
  SoftScore s;
  EXPECT_NEAR(predict(s), ref("predict_centered0_tau2"), kTol);
  EXPECT_LT(predict(s), 0.5);
}

TEST(SoftScore, NoCandidatesScoresZero) {
  const auto s = soft_score(FactorSet::zeros(5));
  EXPECT_EQ(s.candidates, 0u);
  EXPECT_EQ(s.raw_f, 0.0);
  EXPECT_EQ(s.centered_f, 0.0);
}

TEST(SoftScore, FullGridUsesRawScore) {
  ScoreParams p;
  p.sum_mode = SumMode::FullGrid;
  const auto fs = pairs(3, {{0, 1, -1}});
  const auto s = soft_score(fs, p);
  EXPECT_EQ(s.f_used(), s.raw_f);
  // every (c,u) cell contributes exp(0) except the dependent one
  EXPECT_NEAR(s.raw_f, std::log(8.0 + std::exp(soft_order(-1, 4))), 1e-12);
}

TEST(SoftScore, InvalidAlphaRejected) {
  ScoreParams p;
  p.alpha = 0;
  EXPECT_THROW(p.validate(), Error);
  p.alpha = -1;
  EXPECT_THROW(soft_score(FactorSet::zeros(1), p), Error);
}

TEST(SoftScore, GradientMatchesFiniteDifferences) {
  const auto fs = pairs(4, {{0, 1, -1}, {3, 2, +1}, {0, 2, 0}});
  ScoreParams p;
  Eigen::MatrixXd phi = fs.phi_O.cast<double>();
  phi(0, 2) = 0.3;
  const auto g = raw_score_gradient(fs, phi, p);
  const double h = 1e-6;
  for (auto [c, u] : {std::pair{0, 1}, {3, 2}, {0, 2}}) {
    Eigen::MatrixXd a = phi, b = phi;
    a(c, u) += h;
    b(c, u) -= h;
    const double fd = (raw_score(fs, a, p) - raw_score(fs, b, p)) / (2 * h);
    EXPECT_NEAR(g(c, u), fd, 1e-8 * std::max(1.0, std::abs(fd)));
  }
}

TEST(BooleanRule, ClassicWithdrawHasOneWitness) {
  const auto fs = analyze(build_program(test::read_data("withdraw.sol")));
  const auto v = boolean_rule(fs);
  EXPECT_TRUE(v.vulnerable);
  ASSERT_EQ(v.witnesses.size(), 1u);
  EXPECT_EQ(v.witnesses[0], (std::pair<int, int>{7, 9}));
}

TEST(BooleanRule, UpdateBeforeCallIsSafe) {
  EXPECT_FALSE(boolean_rule(analyze(build_program(test::read_data("cei_ok.sol")))).vulnerable);
  EXPECT_FALSE(boolean_rule(pairs(2, {{1, 0, +1}})).vulnerable);
  EXPECT_FALSE(boolean_rule(pairs(2, {{1, 0, 0}})).vulnerable);
}

// Property: the verdict agrees with the sign of the soft score's order term.
TEST(BooleanRule, ThresholdsAgreeWithSoftScoreOnSinglePairs) {
  for (int o : {-1, 1}) {
    const auto fs = pairs(2, {{0, 1, o}});
    EXPECT_EQ(boolean_rule(fs).vulnerable, o == -1);
    EXPECT_EQ(predict(soft_score(fs)) >= 0.5, o == -1);
  }
  // phi_O = 0 sits exactly on the boundary: sigmoid(alpha / 2 - tau) with the defaults.
  EXPECT_DOUBLE_EQ(predict(soft_score(pairs(2, {{0, 1, 0}}))), 0.5);
}
