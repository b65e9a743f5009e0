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
#include <set>
#include <sstream>

#include "factorscan/datagen/corpus.hpp"
#include "factorscan/datagen/generators.hpp"
#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/factors/program.hpp"
#include "factorscan/fusion/rank.hpp"
#include "factorscan/scoring/scoring.hpp"

using namespace factorscan;
using namespace factorscan::datagen;

namespace {

const InterfaceSpec& transfer() { return find_spec("IERC20.transfer(address,uint256)"); }

bool has_code(const ValidationResult& r, const std::string& code) {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](auto& d) { return d.code == code; });
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& ls) {
  std::string s;
  for (const auto& l : ls) s += l + "\n";
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(' ');
  return a == std::string::npos ? "" : s.substr(a);
}

FactorSet factors_of(const LabeledSample& s) { return analyze(build_program(s.source)); }

}  // namespace

TEST(ExternalCall, VariantZeroIsAssignmentOnInterfaceVariable) {
  const auto s = gen_external_call(transfer(), 0);
  EXPECT_EQ(s.provenance.axes.at("context"), "assignment");
  EXPECT_EQ(s.provenance.axes.at("instance"), "interface_var");
  EXPECT_TRUE(validate(s).ok());
  ASSERT_EQ(s.labels.call_lines.size(), 1u);
  const auto fs = factors_of(s);
  EXPECT_EQ(fs.phi_E.cast<int>().sum(), 1);
  EXPECT_EQ(fs.phi_E(s.labels.call_lines[0] - 1), 1);
}

TEST(ExternalCall, ReadOnlyRequireVariantWritesNoState) {
  const auto& spec = find_spec("IERC20.balanceOf(address)");
  ExternalCallAxes axes;
  axes.context = ContextForm::Require;
  const auto s = gen_external_call(spec, axes, 3);
  EXPECT_TRUE(validate(s).ok());
  const auto fs = factors_of(s);
  EXPECT_EQ(fs.phi_S.cast<int>().sum(), 0);
  EXPECT_EQ(fs.phi_E.cast<int>().sum(), 1);
}

TEST(ExternalCall, VariantsDifferStructurally) {
  for (const auto& spec : catalog()) {
    const auto n = external_call_variants(spec).size();
    std::set<std::string> sigs;
    for (std::uint64_t seed = 0; seed < n; ++seed) sigs.insert(gen_external_call(spec, seed).structural_signature());
    EXPECT_EQ(sigs.size(), n) << spec.id();
  }
}

TEST(ExternalCall, InvalidCombinationIsRejected) {
  // Scaled arguments need a uint slot; balanceOf(address) has none.
  const auto& spec = find_spec("IERC20.balanceOf(address)");
  ExternalCallAxes axes;
  axes.param = ParamForm::Scaled;
  ASSERT_FALSE(external_call_conflict(spec, axes).empty());
  try {
    gen_external_call(spec, axes, 0);
    FAIL() << "expected InvalidCombination";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "InvalidCombination");
  }
}

TEST(ExternalCall, NegativesHaveNoCall) {
  const auto s = gen_external_call_negative(transfer(), 2);
  EXPECT_EQ(s.labels.label, 0);
  EXPECT_TRUE(validate(s).ok());
  EXPECT_EQ(factors_of(s).phi_E.cast<int>().sum(), 0);
}

TEST(Dependency, RulesProduceTheirKinds) {
  struct Case {
    DepId id;
    DepKind kind;
  };
  for (auto [id, kind] : {Case{DepId::A_DIRECT, DepKind::Direct}, Case{DepId::B_INDIRECT, DepKind::Indirect},
                          Case{DepId::C_CTRL, DepKind::Ctrl}}) {
    for (auto dir : {Direction::E_TO_S, Direction::S_TO_E}) {
      const auto rule = dep_rule(id, dir);
      if (!dependency_conflict(rule, transfer()).empty()) continue;
      for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto s = gen_dependency(rule, transfer(), seed);
        SCOPED_TRACE(s.source);
        ASSERT_TRUE(validate(s).ok());
        const auto fs = factors_of(s);
        const int c = s.labels.call_lines.at(0) - 1, u = s.labels.update_lines.at(0) - 1;
        EXPECT_EQ(fs.phi_D(c, u), 1);
        EXPECT_EQ(static_cast<DepKind>(fs.dep_kind(c, u)), kind);
      }
    }
  }
}

TEST(Dependency, DirectEToSUsesCapturedValueUnmodified) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = gen_dependency(dep_rule(DepId::A_DIRECT, Direction::E_TO_S), transfer(), seed);
    if (s.provenance.axes.at("source") != "return") continue;
    const auto ls = lines_of(s.source);
    const std::string call = trim(ls.at(s.labels.call_lines[0] - 1));
    const std::string upd = trim(ls.at(s.labels.update_lines[0] - 1));
    const std::string captured = call.substr(call.find(' ') + 1, call.find(" =") - call.find(' ') - 1);
    EXPECT_NE(upd.find("= " + captured + ";"), std::string::npos) << upd << " / " << captured;
    return;
  }
  FAIL() << "no return-sourced sample in 20 seeds";
}

TEST(Dependency, NoneRuleHasNoDependency) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = gen_dependency(dep_rule(DepId::Z_NONE, Direction::E_TO_S), transfer(), seed);
    ASSERT_TRUE(validate(s).ok());
    EXPECT_EQ(factors_of(s).phi_D.cast<int>().sum(), 0);
  }
}

TEST(Ordering, TaxonomyVerdicts) {
  for (auto t : {CeiType::CEI_OK, CeiType::SIMPLE_INT_BEFORE_EFFECT, CeiType::POST_INTERACTION_EFFECTS,
                 CeiType::PATH_SENSITIVE_I_BEFORE_E}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto s = gen_ordering(cei_pattern(t), transfer(), seed);
      SCOPED_TRACE(s.source);
      ASSERT_TRUE(validate(s).ok());
      const auto fs = factors_of(s);
      const auto v = boolean_rule(fs);
      EXPECT_EQ(v.vulnerable, t != CeiType::CEI_OK);
      if (t == CeiType::SIMPLE_INT_BEFORE_EFFECT) EXPECT_EQ(v.witnesses.size(), 1u);
      if (t == CeiType::POST_INTERACTION_EFFECTS) {
        const int c = s.labels.call_lines.at(0) - 1;
        ASSERT_EQ(s.labels.update_lines.size(), 2u);
        EXPECT_EQ(fs.phi_O(c, s.labels.update_lines[1] - 1), -1);
      }
    }
  }
}

// Property: every generator output passes validation, including label re-derivation.
TEST(Validate, ClosedLoopOverTheCatalog) {
  int n = 0;
  for (const auto& spec : catalog()) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const std::vector<LabeledSample> batch = [&] {
        std::vector<LabeledSample> b{gen_external_call(spec, seed), gen_external_call_negative(spec, seed)};
        for (auto id : {DepId::A_DIRECT, DepId::B_INDIRECT, DepId::C_CTRL, DepId::Z_NONE})
          for (auto dir : {Direction::E_TO_S, Direction::S_TO_E}) {
            const auto rule = dep_rule(id, dir);
            if (dependency_conflict(rule, spec).empty()) b.push_back(gen_dependency(rule, spec, seed));
          }
        for (auto t : {CeiType::CEI_OK, CeiType::SIMPLE_INT_BEFORE_EFFECT, CeiType::POST_INTERACTION_EFFECTS,
                       CeiType::PATH_SENSITIVE_I_BEFORE_E})
          b.push_back(gen_ordering(cei_pattern(t), spec, seed));
        if (spec.has_uint_param())
          for (int bits = 0; bits < 16; ++bits)
            b.push_back(gen_full({bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1}, spec, seed));
        return b;
      }();
      for (const auto& s : batch) {
        const auto r = validate(s);
        ASSERT_TRUE(r.ok()) << s.source << r.diagnostics.front().code << ": " << r.diagnostics.front().msg;
        ++n;
      }
    }
  }
  EXPECT_GT(n, 2000);
}

TEST(Validate, AnchorOnGuardIsRejected) {
  auto s = gen_external_call(transfer(), 0);
  auto ls = lines_of(s.source);
  const auto it = std::find_if(ls.begin(), ls.end(), [](auto& l) { return trim(l).rfind("require(", 0) == 0; });
  ASSERT_NE(it, ls.end());
  ls.insert(it, "        //s");
  s.source = join(ls);
  EXPECT_TRUE(has_code(validate(s), "AnchorOnGuard"));
}

TEST(Validate, AdjacentCallAndUpdateAreRejected) {
  auto s = gen_dependency(dep_rule(DepId::A_DIRECT, Direction::E_TO_S), transfer(), 1);
  auto ls = lines_of(s.source);
  const int call = s.labels.call_lines.at(0);  // 1-based
  const auto anchor = std::find_if(ls.begin() + call, ls.end(), [](auto& l) { return trim(l) == "//s"; });
  ASSERT_NE(anchor, ls.end());
  ls.erase(ls.begin() + call, anchor);  // drop everything between the call and the update anchor
  s.source = join(ls);
  EXPECT_TRUE(has_code(validate(s), "NonAdjacency"));
}

TEST(Validate, WrongLabelsAreCaught) {
  auto s = gen_ordering(cei_pattern(CeiType::CEI_OK), transfer(), 4);
  s.labels.vulnerable = true;
  EXPECT_FALSE(validate(s).ok());
}

TEST(Validate, AvoidedIdentifierInOrderingTask) {
  auto s = gen_ordering(cei_pattern(CeiType::CEI_OK), transfer(), 5);
  auto ls = lines_of(s.source);
  const auto fn = std::find_if(ls.begin(), ls.end(), [](auto& l) { return l.find("function ") != std::string::npos; });
  ASSERT_NE(fn, ls.end());
  ls.insert(fn + 1, "        uint256 balances = 1;");
  s.source = join(ls);
  EXPECT_TRUE(has_code(validate(s), "AvoidedIdentifier"));
}

TEST(Generators, DeterministicPerSeed) {
  EXPECT_EQ(gen_full({1, 1, 0, 1}, transfer(), 42).source, gen_full({1, 1, 0, 1}, transfer(), 42).source);
  EXPECT_EQ(gen_ordering(cei_pattern(CeiType::PATH_SENSITIVE_I_BEFORE_E), transfer(), 9).source,
            gen_ordering(cei_pattern(CeiType::PATH_SENSITIVE_I_BEFORE_E), transfer(), 9).source);
  CorpusConfig cfg;
  cfg.task = Task::O;
  cfg.count = 50;
  cfg.seed = 8;
  const auto a = gen_corpus(cfg), b = gen_corpus(cfg);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].source, b.samples[i].source);
}

TEST(Generators, FullTaskNeedsAUintParameter) {
  try {
    gen_full({1, 1, 1, 1}, find_spec("IERC1155.setApprovalForAll(address,bool)"), 0);
    FAIL() << "expected IncompatibleRule";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "IncompatibleRule");
  }
}

TEST(Corpus, PriorFidelity) {
  for (auto [p, n, expect] : {std::tuple{1.0, 2.0, 100.0}, std::tuple{0.5, 0.95, 300 * 0.5 / 1.45}}) {
    CorpusConfig cfg;
    cfg.task = Task::Full;
    cfg.count = 300;
    cfg.pos_ratio = p;
    cfg.neg_ratio = n;
    cfg.seed = 21;
    const auto c = gen_corpus(cfg);
    ASSERT_EQ(c.samples.size(), 300u);
    const auto pos = std::count_if(c.samples.begin(), c.samples.end(), [](auto& s) { return s.labels.label == 1; });
    EXPECT_LE(std::abs(double(pos) - expect), 1.0);
    EXPECT_EQ(c.manifest.positives, std::size_t(pos));
    EXPECT_EQ(c.manifest.rejected, 0u);
    for (const auto& s : c.samples) ASSERT_TRUE(validate(s).ok());
  }
}

TEST(Corpus, TemplatesDoNotRepeatSignatures) {
  for (auto task : {Task::E, Task::D, Task::O, Task::Full}) {
    CorpusConfig cfg;
    cfg.task = task;
    cfg.count = 200;
    cfg.seed = 5;
    const auto c = gen_corpus(cfg);
    EXPECT_EQ(c.manifest.repeated_signatures, 0u) << to_string(task);
    std::map<std::string, std::set<std::string>> seen;
    for (const auto& s : c.samples) EXPECT_TRUE(seen[s.provenance.template_id].insert(s.structural_signature()).second);
  }
}

TEST(Corpus, FullCorpusCertificateSpansTheFactors) {
  CorpusConfig cfg;
  cfg.task = Task::Full;
  cfg.count = 120;
  cfg.pos_ratio = 1;
  cfg.neg_ratio = 2;
  const auto c = gen_corpus(cfg);
  ASSERT_EQ(c.manifest.certificate.size(), 5u);
  Eigen::MatrixXi z(5, 4);
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 4; ++k) z(i, k) = (*c.samples[c.manifest.certificate[i]].labels.factor_bits)[k];
  EXPECT_EQ(fusion::design_matrix_rank(z).rank, 4);
}

TEST(Corpus, FactorialDesignIsBalanced) {
  CorpusConfig cfg;
  cfg.task = Task::Full;
  cfg.count = 160;
  cfg.factorial = true;
  const auto c = gen_corpus(cfg);
  Eigen::MatrixXi z(160, 4);
  for (int i = 0; i < 160; ++i)
    for (int k = 0; k < 4; ++k) z(i, k) = (*c.samples[i].labels.factor_bits)[k];
  const auto r = fusion::design_matrix_rank(z);
  EXPECT_EQ(r.rank, 4);
  for (double m : c.manifest.factor_marginals) EXPECT_NEAR(m, 0.5, 1e-12);
  EXPECT_TRUE(r.covariance_bound_holds);
  EXPECT_GE(r.min_eigenvalue_covariance, 0.2 * 0.8 - 1e-9);
}

TEST(Corpus, JsonRoundTrip) {
  const auto s = gen_ordering(cei_pattern(CeiType::POST_INTERACTION_EFFECTS), transfer(), 3);
  const auto back = sample_from_json(to_json(s));
  EXPECT_EQ(back.source, s.source);
  EXPECT_EQ(back.labels.update_lines, s.labels.update_lines);
  EXPECT_EQ(back.labels.cei_type, s.labels.cei_type);
  EXPECT_EQ(back.provenance.axes, s.provenance.axes);
  EXPECT_EQ(back.structural_signature(), s.structural_signature());
}

TEST(Corpus, InvalidConfigRejected) {
  CorpusConfig cfg;
  cfg.pos_ratio = 0;
  cfg.neg_ratio = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.task = Task::E;
  cfg.factorial = true;
  EXPECT_THROW(gen_corpus(cfg), Error);
}
