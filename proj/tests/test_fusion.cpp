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
#include <random>
#include <sstream>

#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/factors/program.hpp"
#include "factorscan/fusion/features.hpp"
#include "factorscan/fusion/model.hpp"
#include "factorscan/fusion/rank.hpp"
#include "factorscan/fusion/train.hpp"
#include "factorscan/ir/ir_record.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace factorscan;
using namespace factorscan::fusion;
using namespace factorscan::test;

namespace {

std::vector<Sample<double>> separable_toy(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Sample<double>> out;
  for (int i = 0; i < n; ++i) {
    Sample<double> s;
    s.label = i % 2;
    s.x = BranchFeatures<double>(kDefaultHidden);
    for (Eigen::Index j = 0; j < s.x.Z.size(); ++j) s.x.Z.data()[j] = u(rng);
    // Class signal in the first coordinate of every branch: [1, 1.5] vs [-0.5, 0].
    for (int k = 0; k < kBranches; ++k) s.x.Z(0, k) = s.label ? 1.0 + 0.5 * u(rng) : -0.5 * u(rng);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Gradients, MatchFiniteDifferencesOnRandomDraws) {
  for (auto q : {Quantity::Logit, Quantity::Ce, Quantity::Kl}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Draw d = random_draw(seed);
      const auto r = finite_difference(q, d, {});
      ASSERT_LT(r.worst, 1e-4) << "quantity " << int(q) << " seed " << seed << " at " << r.where;
    }
  }
}

TEST(Gradients, KlVariantsMatchFiniteDifferences) {
  for (auto sens : {Sensitivity::Total, Sensitivity::FusionOnly}) {
    for (std::uint64_t seed = 101; seed <= 140; ++seed) {
      JacoOptions opt;
      opt.sensitivity = sens;
      const auto r = finite_difference(Quantity::Kl, random_draw(seed), opt);
      ASSERT_LT(r.worst, 1e-4) << "seed " << seed << " at " << r.where;
    }
  }
}

TEST(Gradients, DetachedTargetIgnoresTheSensitivityPath) {
  const Draw d = random_draw(7);
  JacoOptions det;
  det.target = KlTarget::Detached;
  const auto f = evaluate(d.x, d.gp, d.hp);
  const auto t = sensitivity_target(f, d.gp, d.hp);
  const auto g = kl_gradient(d.x, d.gp, d.hp, f, t, det);
  EXPECT_TRUE(g.dw.isZero());  // w only enters through q
  // With q frozen the gate gradient is (active - q) / tau pulled back through the scores.
  Simplex<double> s = (f.active - t.q) / d.gp.tau_gate;
  for (int k = 0; k < kBranches; ++k)
    if (!d.gp.mask[k]) s[k] = 0;
  EXPECT_TRUE(g.dc.isApprox(s, 1e-12));
}

TEST(Gate, MaskedUniformScores) {
  GateParams<double> gp;
  gp.c = Simplex<double>::Ones();
  gp.mask << 1, 1, 1, 0;
  const auto w = gate(BranchFeatures<double>(), gp);
  EXPECT_NEAR(w[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(w[1], 1.0 / 3, 1e-15);
  EXPECT_NEAR(w[2], 1.0 / 3, 1e-15);
  EXPECT_EQ(w[3], 0.0);
}

TEST(Gate, LowTemperatureIsOneHot) {
  GateParams<double> gp;
  gp.c << 0.1, 0.4, 0.2, 0.3;
  gp.tau_gate = 1e-4;
  const auto w = gate(BranchFeatures<double>(), gp);
  EXPECT_NEAR(w[1], 1.0, 1e-12);
  EXPECT_NEAR(w[0] + w[2] + w[3], 0.0, 1e-12);
}

TEST(Gate, PriorMixingGivesMaskedBranchesTheirPrior) {
  GateParams<double> gp;
  gp.mask << 1, 1, 0, 1;
  gp.prior = Simplex<double>(0.25, 0.25, 0.2, 0.3);
  gp.prior_mixing = true;
  const auto w = gate(BranchFeatures<double>(), gp);
  EXPECT_NEAR(w[2], 0.2, 1e-15);
  EXPECT_NEAR(w.sum(), 1.0, 1e-15);
}

TEST(Gate, AllMaskedIsAnError) {
  GateParams<double> gp;
  gp.mask.setZero();
  EXPECT_THROW(gate(BranchFeatures<double>(), gp), Error);
  EXPECT_THROW(gp.validate(), Error);
}

TEST(Fuse, HandComputedExample) {
  BranchFeatures<double> x;
  x.Z(0, 0) = 1;
  x.Z(1, 1) = 1;
  HeadParams<double> hp;
  hp.w[0] = hp.w[1] = 1;
  const auto f = fuse_and_predict(x, Simplex<double>(0.5, 0.5, 0, 0), hp);
  EXPECT_DOUBLE_EQ(f.h[0], 0.5);
  EXPECT_DOUBLE_EQ(f.h[1], 0.5);
  EXPECT_DOUBLE_EQ(f.logit, 1.0);
  EXPECT_NEAR(f.prob, 0.7310585786300049, 1e-15);
}

TEST(Kl, UniformGateAgainstSkewedTarget) {
  const Simplex<double> q(0.7, 0.1, 0.1, 0.1), uni = Simplex<double>::Constant(0.25);
  const double expect = 0.7 * std::log(2.8) + 0.3 * std::log(0.4);
  EXPECT_NEAR(jacobian_alignment_loss(q, uni, Mask::Ones()), expect, 1e-15);
  EXPECT_NEAR(expect, 0.4459, 1e-4);  // exact value 0.445846; the quoted figure is rounded up
  EXPECT_GT(std::abs(jacobian_alignment_loss(uni, q, Mask::Ones()) - expect), 1e-3);  // not symmetric
  EXPECT_EQ(jacobian_alignment_loss(q, q, Mask::Ones()), 0.0);
}

TEST(Sensitivity, MatchesLogitJacobianColumns) {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const Draw d = random_draw(seed);
    const auto f = evaluate(d.x, d.gp, d.hp);
    const auto g = logit_gradient(d.x, f);
    const auto t = sensitivity_target(f, d.gp, d.hp);
    EXPECT_NEAR(t.q.sum(), 1.0, 1e-12);
    for (int k = 0; k < kBranches; ++k) {
      if (!d.gp.mask[k]) {
        EXPECT_EQ(t.q[k], 0.0);
        continue;
      }
      EXPECT_NEAR(t.g[k], g.dZ.col(k).norm(), 1e-12);
    }
  }
}

TEST(Train, WarmupLength) {
  EXPECT_EQ(warmup_steps(0.1, 490), 49);
  EXPECT_EQ(warmup_steps(0.1, 500), 50);
  EXPECT_EQ(warmup_steps(0.1, 491), 50);
  EXPECT_EQ(warmup_steps(0.0, 300), 0);
}

TEST(Train, HeadFrozenDuringWarmupAndMaskedWeightsZero) {
  const auto data = separable_toy(64, 3);
  GateParams<double> cfg;
  cfg.mask << 1, 0, 1, 1;
  cfg.warmup_ratio = 0.2;
  TrainConfig tc;
  tc.total_steps = 50;
  tc.batch_size = 16;
  auto m0 = initialize(cfg, kDefaultHidden, 9);
  const Vector<double> w0 = m0.head.w;
  const double b0 = m0.head.b;
  int checked = 0;
  auto res = train<double>(data, m0, tc, [&](int step, const Model<double>& m, const LossBreakdown<double>&) {
    if (step < 10) {
      EXPECT_TRUE(m.head.w == w0);
      EXPECT_EQ(m.head.b, b0);
      ++checked;
    }
    for (const auto& s : data) ASSERT_EQ(gate(s.x, m.gate)[1], 0.0);
  });
  EXPECT_EQ(res.warmup_steps, 10);
  EXPECT_EQ(checked, 10);
  EXPECT_FALSE(res.model.head.w == w0);
}

TEST(Train, FixedAlphaHasNoAlignmentLoss) {
  const auto data = separable_toy(64, 4);
  GateParams<double> cfg;
  cfg.fixed_alpha = Simplex<double>::Constant(0.25);
  cfg.lambda_jaco = 0.5;
  TrainConfig tc;
  tc.total_steps = 40;
  const auto m0 = initialize(cfg, kDefaultHidden, 1);
  const auto res = train(data, m0, tc);
  for (const auto& l : res.history) EXPECT_EQ(l.jaco, 0.0);
  EXPECT_TRUE(res.model.gate.U == m0.gate.U);
}

TEST(Train, SameSeedIsBitIdentical) {
  const auto data = separable_toy(64, 5);
  GateParams<double> cfg;
  TrainConfig tc;
  tc.total_steps = 60;
  tc.seed = 11;
  const auto a = train(data, initialize(cfg, kDefaultHidden, 2), tc);
  const auto b = train(data, initialize(cfg, kDefaultHidden, 2), tc);
  EXPECT_TRUE(a.model.gate.U == b.model.gate.U);
  EXPECT_TRUE(a.model.gate.c == b.model.gate.c);
  EXPECT_TRUE(a.model.head.w == b.model.head.w);
  EXPECT_EQ(a.model.head.b, b.model.head.b);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].total, b.history[i].total);
}

TEST(Train, SeparableToyReachesPerfectAccuracy) {
  const auto data = separable_toy(64, 6);
  GateParams<double> cfg;
  cfg.fixed_alpha = Simplex<double>::Constant(0.25);
  cfg.lambda_jaco = 0;
  TrainConfig tc;
  tc.total_steps = 200;
  tc.batch_size = 64;  // one step is one epoch
  tc.learning_rate = 0.01;
  const auto res = train(data, initialize(cfg, kDefaultHidden, 0), tc);
  for (std::size_t i = res.warmup_steps + 1; i < res.history.size(); ++i)
    EXPECT_LT(res.history[i].ce, res.history[i - 1].ce) << "epoch " << i;
  int correct = 0;
  for (const auto& s : data) correct += (res.model.predict(s.x) >= 0.5) == (s.label == 1);
  EXPECT_EQ(correct, 64);
}

TEST(Train, RejectsBadInput) {
  GateParams<double> cfg;
  TrainConfig tc;
  EXPECT_THROW(train(std::vector<Sample<double>>{}, initialize(cfg, kDefaultHidden, 0), tc), Error);
  auto data = separable_toy(4, 1);
  data[0].label = 2;
  EXPECT_THROW(train(data, initialize(cfg, kDefaultHidden, 0), tc), Error);
  tc.total_steps = 0;
  EXPECT_THROW(tc.validate(), Error);
}

namespace {

// Plain Gaussian elimination with partial pivoting, independent of Eigen's decompositions.
int elimination_rank(Eigen::MatrixXd a, double tol) {
  int rank = 0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index col = 0; col < a.cols() && rank < a.rows(); ++col) {
    Eigen::Index piv = rank;
    for (Eigen::Index r = rank; r < a.rows(); ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tol * scale) continue;
    a.row(piv).swap(a.row(rank));
    for (Eigen::Index r = rank + 1; r < a.rows(); ++r) a.row(r) -= a(r, col) / a(rank, col) * a.row(rank);
    ++rank;
  }
  return rank;
}

}  // namespace

TEST(Rank, AnchorAndSingleBitFlips) {
  Eigen::MatrixXi z(5, 4);
  z << 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_EQ(design_matrix_rank(z).rank, 4);
  EXPECT_EQ(elimination_rank(z.cast<double>(), 1e-12), 4);
  Eigen::MatrixXi dup(3, 4);
  dup << 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1;
  EXPECT_EQ(design_matrix_rank(dup).rank, 2);
}

TEST(Rank, BalancedFactorialCovarianceBound) {
  Eigen::MatrixXi z(16, 4);
  for (int i = 0; i < 16; ++i)
    for (int k = 0; k < 4; ++k) z(i, k) = (i >> k) & 1;
  const auto r = design_matrix_rank(z);
  EXPECT_EQ(r.rank, 4);
  EXPECT_DOUBLE_EQ(r.balance_epsilon, 0.5);
  EXPECT_NEAR(r.min_eigenvalue_covariance, 0.25, 1e-12);
  EXPECT_TRUE(r.covariance_bound_holds);
  EXPECT_THROW(design_matrix_rank(Eigen::MatrixXi(0, 4)), Error);
}

TEST(Rank, GenericJacobianColumns) {
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    Draw d = random_draw(seed);
    d.gp.mask.setOnes();
    d.gp.prior.reset();
    d.gp.prior_mixing = false;
    const auto J = logit_jacobian(d.x, d.gp, d.hp);
    EXPECT_EQ(jacobian_column_rank(d.gp, d.hp, d.x), 4);
    EXPECT_EQ(elimination_rank(J, 1e-10), 4);
    d.gp.mask << 0, 1, 0, 1;
    EXPECT_LE(jacobian_column_rank(d.gp, d.hp, d.x), 2);
  }
}

TEST(Features, VulnerableFixtureAndLedgerRecord) {
  const auto v = extract_branch_features(analyze(build_program(test::read_data("withdraw.sol"))));
  EXPECT_EQ(std::string(kFeatureNames[3][0]), "share_call_first");
  EXPECT_DOUBLE_EQ(v.Z(0, 3), 1.0);

  const auto rec = ir::record_to_factors(ir::parse_ir_record(test::read_data("ledger_ir_dfg.json")));
  const auto a3 = extract_branch_features(rec.factors);
  EXPECT_DOUBLE_EQ(a3.Z(0, 3), 0.0);
  EXPECT_EQ(std::string(kFeatureNames[2][0]), "dependency_density");
  EXPECT_DOUBLE_EQ(a3.Z(0, 2), 1.0);  // one dependent pair out of one candidate
  for (int k = 0; k < kBranches; ++k) EXPECT_TRUE(((a3.Z.col(k).array() >= 0) && (a3.Z.col(k).array() <= 1)).all());
}

TEST(Serialization, DatasetAndCheckpointRoundTrip) {
  std::vector<LabeledSample> data;
  for (auto& s : separable_toy(5, 8)) data.push_back({s, {{"i", data.size()}}});
  std::stringstream ss;
  write_dataset_jsonl(ss, data);
  const auto back = read_dataset_jsonl(ss);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_TRUE(back[i].sample.x.Z == data[i].sample.x.Z);
    EXPECT_EQ(back[i].sample.label, data[i].sample.label);
    EXPECT_EQ(back[i].meta, data[i].meta);
  }

  GateParams<double> cfg;
  cfg.mask << 1, 1, 0, 1;
  TrainConfig tc;
  tc.total_steps = 13;
  const Model<double> m = initialize(cfg, kDefaultHidden, 4);
  TrainConfig tc2;
  const auto m2 = checkpoint_from_json(checkpoint_to_json(m, tc), &tc2);
  EXPECT_TRUE(m2.gate.U == m.gate.U);
  EXPECT_TRUE(m2.gate.mask == m.gate.mask);
  EXPECT_TRUE(m2.head.w == m.head.w);
  EXPECT_EQ(tc2.total_steps, 13);
}
