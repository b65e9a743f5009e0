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


// Acceptance checks. One line per criterion; exit status is the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "factorscan/datagen/corpus.hpp"
#include "factorscan/datagen/generators.hpp"
#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/factors/oracle.hpp"
#include "factorscan/factors/program.hpp"
#include "factorscan/fusion/rank.hpp"
#include "factorscan/fusion/train.hpp"
#include "factorscan/harness/config.hpp"
#include "factorscan/harness/experiment.hpp"
#include "factorscan/harness/metrics.hpp"
#include "factorscan/ir/ir_record.hpp"
#include "factorscan/scoring/scoring.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace factorscan;
namespace dg = factorscan::datagen;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<dg::LabeledSample> corpus(dg::Task task, std::size_t n, std::uint64_t seed) {
  dg::CorpusConfig cfg;
  cfg.task = task;
  cfg.count = n;
  cfg.seed = seed;
  return dg::gen_corpus(cfg).samples;
}

// 1. Analytic factors equal path enumeration.
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0, mismatches = 0, too_large = 0;
  for (auto task : {dg::Task::E, dg::Task::D, dg::Task::O, dg::Task::Full}) {
    for (const auto& s : corpus(task, 150, 1001)) {
      const auto p = build_program(s.source);
      try {
        const auto oracle = brute_force_oracle(p);
        ++checked;
        if (!oracle.same_factors(analyze(p))) ++mismatches;
      } catch (const Error& e) {
        if (e.code() != "TooLarge") throw;
        ++too_large;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {checked >= 500 && mismatches == 0 && secs < 60,
          fmt("%d programs, %d mismatches, %d beyond bound, %.2f s", checked, mismatches, too_large, secs)};
}

// 2. Boolean rule agrees with the ordering taxonomy.
Outcome taxonomy_agreement() {
  int n = 0, agree = 0;
  for (const auto& spec : dg::catalog()) {
    for (auto t : {dg::CeiType::CEI_OK, dg::CeiType::SIMPLE_INT_BEFORE_EFFECT, dg::CeiType::POST_INTERACTION_EFFECTS,
                   dg::CeiType::PATH_SENSITIVE_I_BEFORE_E}) {
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto s = dg::gen_ordering(dg::cei_pattern(t), spec, seed);
        const bool vulnerable = boolean_rule(analyze(build_program(s.source))).vulnerable;
        ++n;
        agree += vulnerable == !dg::cei_pattern(t).good;
      }
    }
  }
  return {n >= 300 && agree == n, fmt("%d/%d samples agree", agree, n)};
}

// 3. Every generated sample validates, labels re-derived by the analyzer.
Outcome generator_round_trip() {
  int n = 0, ok = 0;
  auto take = [&](const dg::LabeledSample& s) {
    ++n;
    ok += dg::validate(s).ok();
  };
  for (auto task : {dg::Task::E, dg::Task::D, dg::Task::O, dg::Task::Full})
    for (const auto& s : corpus(task, 250, 2002)) take(s);
  for (const auto& spec : dg::catalog()) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      take(dg::gen_external_call(spec, seed));
      take(dg::gen_external_call_negative(spec, seed));
      for (auto id : {dg::DepId::A_DIRECT, dg::DepId::B_INDIRECT, dg::DepId::C_CTRL, dg::DepId::Z_NONE})
        for (auto dir : {dg::Direction::E_TO_S, dg::Direction::S_TO_E}) {
          const auto rule = dg::dep_rule(id, dir);
          if (dg::dependency_conflict(rule, spec).empty()) take(dg::gen_dependency(rule, spec, seed));
        }
    }
  }
  return {ok == n, fmt("%d/%d samples valid", ok, n)};
}

// 4. The three raw compiler-aware records.
Outcome raw_record_fixtures() {
  using minisol::CallKind;
  std::vector<std::string> bad;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) bad.push_back(what);
  };
  const auto single = ir::parse_ir_record(test::read_data("erc1155_bytecode_calls.json"));
  expect(single.id == 603, "transfer record id");
  expect(single.bytecode_calls.size() == 2, "transfer record call count");
  if (single.bytecode_calls.size() == 2) {
    expect(single.bytecode_calls[0].opcode == CallKind::HighLevel &&
               single.bytecode_calls[0].to_source == "TMP_128(IERC1155Receiver)" && !single.bytecode_calls[0].value,
           "transfer record first call");
    expect(single.bytecode_calls[1].opcode == CallKind::Call && single.bytecode_calls[1].to_source == "recipient" &&
               single.bytecode_calls[1].value == "amount",
           "transfer record second call");
  }
  const auto batch = ir::parse_ir_record(test::read_data("erc1155_bytecode_calls_batch.json"));
  expect(batch.id == 603 && batch.bytecode_calls.size() == 2, "batch record shape");
  if (batch.bytecode_calls.size() == 2) {
    expect(batch.bytecode_calls[0].opcode == CallKind::HighLevel &&
               batch.bytecode_calls[0].to_source == "TMP_135(IERC1155Receiver)",
           "batch record first call");
    expect(batch.bytecode_calls[1].opcode == CallKind::Call && batch.bytecode_calls[1].to_source == "target" &&
               batch.bytecode_calls[1].value == "value",
           "batch record second call");
  }
  const auto ledger = ir::parse_ir_record(test::read_data("ledger_ir_dfg.json"));
  expect(ledger.blocks.size() == 2, "ledger record block count");
  if (ledger.blocks.size() == 2) {
    expect(ledger.blocks[1].block_depends_on == std::vector<int>{0}, "ledger record dependency");
    expect(ledger.blocks[0].operations.size() == 1 && ledger.blocks[0].operations[0].type == ir::OpType::StateWrite,
           "ledger record state write");
    const auto f = ir::record_to_factors(ledger);
    const auto& fs = f.factors;
    expect(fs.phi_S(0) == 1 && fs.phi_E(1) == 1, "ledger record phi_S/phi_E");
    expect(fs.phi_D(1, 0) == 1 && fs.phi_O(1, 0) == 1, "ledger record phi_D/phi_O");
    expect(!boolean_rule(fs).vulnerable, "ledger record verdict");
  }
  std::string detail = bad.empty() ? "transfer, batch and ledger records match; ledger record not vulnerable" : "failed:";
  for (const auto& b : bad) detail += " " + b + ";";
  return {bad.empty(), detail};
}

// 5. Analytic gradients vs central differences.
Outcome gradient_fidelity() {
  double worst = 0;
  std::string where;
  for (auto q : {test::Quantity::Logit, test::Quantity::Ce, test::Quantity::Kl}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto r = test::finite_difference(q, test::random_draw(seed), {});
      if (r.worst > worst) {
        worst = r.worst;
        where = fmt("quantity %d seed %d param %s", int(q), int(seed), r.where.c_str());
      }
    }
  }
  return {worst < 1e-4, fmt("100 draws x {logit, CE, KL}, max relative error %.2e (%s)", worst, where.c_str())};
}

std::vector<fusion::Sample<double>> training_set() {
  dg::CorpusConfig cfg;
  cfg.count = 200;
  cfg.pos_ratio = 1;
  cfg.neg_ratio = 2;
  cfg.seed = 77;
  return harness::featurize(dg::gen_corpus(cfg).samples);
}

// 6. Training contracts.
Outcome training_contracts() {
  using namespace fusion;
  const auto data = training_set();
  TrainConfig tc;
  tc.total_steps = 100;
  tc.seed = 5;
  std::vector<std::string> bad;

  GateParams<double> masked;
  masked.mask << 1, 0, 1, 0;
  masked.warmup_ratio = 0.2;
  const auto m0 = initialize(masked, kDefaultHidden, 3);
  const int warm = warmup_steps(0.2, tc.total_steps);
  bool head_frozen = true, mask_zero = true;
  const auto run = train<double>(data, m0, tc, StepCallback<double>([&](int step, const Model<double>& m, const LossBreakdown<double>&) {
    if (step < warm && (m.head.w != m0.head.w || m.head.b != m0.head.b)) head_frozen = false;
    for (const auto& s : data) {
      const auto w = gate(s.x, m.gate);
      if (w[1] != 0.0 || w[3] != 0.0) mask_zero = false;
    }
  }));
  if (!head_frozen) bad.push_back("head moved during warm-up");
  if (!mask_zero) bad.push_back("masked branch got weight");
  if (run.model.head.w == m0.head.w) bad.push_back("head never trained");

  GateParams<double> fixed;
  fixed.fixed_alpha = Simplex<double>(0.4, 0.3, 0.2, 0.1);
  fixed.lambda_jaco = 1.0;
  const auto fr = train(data, initialize(fixed, kDefaultHidden, 3), tc);
  for (const auto& l : fr.history)
    if (l.jaco != 0.0) {
      bad.push_back("fixed-alpha run has alignment loss");
      break;
    }

  GateParams<double> plain;
  const auto a = train(data, initialize(plain, kDefaultHidden, 8), tc);
  const auto b = train(data, initialize(plain, kDefaultHidden, 8), tc);
  bool same = a.model.gate.U == b.model.gate.U && a.model.gate.c == b.model.gate.c && a.model.head.w == b.model.head.w &&
              a.model.head.b == b.model.head.b;
  for (std::size_t i = 0; same && i < a.history.size(); ++i) same = a.history[i].total == b.history[i].total;
  if (!same) bad.push_back("same-seed runs differ");

  std::string detail = bad.empty() ? fmt("mask exact zero, L_jaco = 0 under fixed alpha, head frozen %d steps, "
                                         "bit-identical reruns",
                                         warm)
                                   : "failed:";
  for (const auto& s : bad) detail += " " + s + ";";
  return {bad.empty(), detail};
}

// 7. Full-rankness suite.
Outcome full_rankness() {
  using namespace fusion;
  dg::CorpusConfig cfg;
  cfg.count = 300;
  cfg.pos_ratio = 1;
  cfg.neg_ratio = 2;
  cfg.seed = 31;
  const auto c = dg::gen_corpus(cfg);
  Eigen::MatrixXi anchor(static_cast<Eigen::Index>(c.manifest.certificate.size()), 4);
  for (std::size_t i = 0; i < c.manifest.certificate.size(); ++i)
    for (int k = 0; k < 4; ++k)
      anchor(Eigen::Index(i), k) = (*c.samples[c.manifest.certificate[i]].labels.factor_bits)[std::size_t(k)];
  const int anchor_rank = design_matrix_rank(anchor).rank;

  cfg.factorial = true;
  cfg.count = 320;
  const auto fc = dg::gen_corpus(cfg);
  Eigen::MatrixXi bits(Eigen::Index(fc.samples.size()), 4);
  for (std::size_t i = 0; i < fc.samples.size(); ++i)
    for (int k = 0; k < 4; ++k) bits(Eigen::Index(i), k) = (*fc.samples[i].labels.factor_bits)[std::size_t(k)];
  const auto cov = design_matrix_rank(bits);

  int full_ok = 0, masked_ok = 0;
  const int draws = 50;
  for (int s = 0; s < draws; ++s) {
    auto d = test::random_draw(std::uint64_t(1000 + s));
    d.gp.mask.setOnes();
    d.gp.prior.reset();
    d.gp.prior_mixing = false;
    full_ok += jacobian_column_rank(d.gp, d.hp, d.x) == 4;
    d.gp.mask << 1, 0, 1, 0;
    masked_ok += jacobian_column_rank(d.gp, d.hp, d.x) <= 2;
  }
  const double eps = cov.balance_epsilon;
  return {anchor_rank == 4 && cov.covariance_bound_holds && full_ok == draws && masked_ok == draws,
          fmt("anchor rank %d; min eig cov %.4f >= eps(1-eps) %.4f; Jacobian rank 4 in %d/%d, <=2 masked in %d/%d",
              anchor_rank, cov.min_eigenvalue_covariance, eps * (1 - eps), full_ok, draws, masked_ok, draws)};
}

// 8. Prior-shift stability.
Outcome prior_shift() {
  const auto t0 = std::chrono::steady_clock::now();
  harness::RunConfig cfg;  // ratios 1:2 and 0.5:0.95, seeds {1,2,3}, 600 training samples
  const auto r = harness::run_prior_shift(cfg);
  const double secs = seconds_since(t0);
  const bool ok = cfg.seeds.size() >= 3 && cfg.prior_shift.train_count >= 600 && r.min_final_auroc >= 0.95 &&
                  r.mean_deviation <= 0.05 && secs < 300;
  return {ok, fmt("%zu runs x %zu samples, min final AUROC %.4f, mean deviation %.4f, %.1f s", r.runs.size(),
                  cfg.prior_shift.train_count, r.min_final_auroc, r.mean_deviation, secs)};
}

double brute_auroc(const std::vector<harness::Prediction>& p) {
  double good = 0, pairs = 0;
  for (const auto& a : p)
    for (const auto& b : p)
      if (a.label == 1 && b.label == 0) {
        pairs += 1;
        good += a.score > b.score ? 1.0 : a.score == b.score ? 0.5 : 0.0;
      }
  return good / pairs;
}

// 9. Metric identities.
Outcome metric_identities() {
  const auto m = harness::metrics_from_confusion(27, 0, 4, 0);
  const double recall_pct = std::round(*m.recall * 10000) / 100;
  // Every label vector of every length 2..12, with tied and untied score draws.
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> lvl(0, 3);
  std::uniform_real_distribution<double> u(0, 1);
  long lists = 0, wrong = 0;
  for (int n = 2; n <= 12; ++n) {
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      for (int tied = 0; tied < 2; ++tied) {
        std::vector<harness::Prediction> p(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) p[std::size_t(i)] = {tied ? lvl(rng) / 3.0 : u(rng), int((mask >> i) & 1)};
        ++lists;
        if (std::abs(harness::auroc(p) - brute_auroc(p)) > 1e-12) ++wrong;
      }
    }
  }
  return {recall_pct == 87.10 && wrong == 0,
          fmt("recall 27/31 = %.2f%%; AUROC == pair counting on %ld lists (%ld wrong)", recall_pct, lists, wrong)};
}

// 10. Soft scoring vs the committed high-precision script output.
Outcome scoring_arithmetic() {
  std::ifstream in(std::string(FACTORSCAN_ORACLE_DIR) + "/scoring_reference.json");
  const auto ref = nlohmann::json::parse(in);
  auto pairs = [](int n, std::initializer_list<std::tuple<int, int, int>> cu) {
    auto fs = FactorSet::zeros(n);
    for (auto [c, u, o] : cu) {
      fs.phi_E(c) = 1;
      fs.phi_S(u) = 1;
      fs.phi_D(c, u) = 1;
      fs.phi_O(c, u) = std::int8_t(o);
    }
    return fs;
  };
  const auto one = soft_score(pairs(2, {{0, 1, -1}}));
  const auto two = soft_score(pairs(3, {{0, 1, -1}, {0, 2, +1}}));
  const std::vector<std::pair<const char*, double>> got = {
      {"soft_order_minus1_alpha4", soft_order(-1, 4)},
      {"soft_order_plus1_alpha4", soft_order(1, 4)},
      {"single_pair_raw", one.raw_f},
      {"single_pair_centered", one.centered_f},
      {"two_pair_raw", two.raw_f},
      {"two_pair_centered", two.centered_f},
      {"predict_centered0_tau2", predict(SoftScore{})},
      {"predict_single_pair", predict(one)},
  };
  double worst = 0;
  for (const auto& [k, v] : got) worst = std::max(worst, std::abs(v - ref.at(k).get<double>()));
  return {worst < 1e-9, fmt("%zu values, max |diff| %.1e vs 50-digit reference", got.size(), worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"factor oracle equivalence", oracle_equivalence},
      {"boolean rule vs ordering taxonomy", taxonomy_agreement},
      {"generator round-trip", generator_round_trip},
      {"raw record fixtures", raw_record_fixtures},
      {"gradient fidelity", gradient_fidelity},
      {"training contracts", training_contracts},
      {"full-rankness suite", full_rankness},
      {"prior-shift stability", prior_shift},
      {"metric identities", metric_identities},
      {"scoring arithmetic", scoring_arithmetic},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed;
}
