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


#include "factorscan/datagen/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <set>

#include "draft.hpp"
#include "factorscan/error.hpp"

namespace factorscan::datagen {

namespace {

/// A sample factory bound to one template; the argument is a fresh seed.
struct Template {
  std::string id;
  std::function<LabeledSample(std::uint64_t)> make;
};

std::vector<Template> templates_for(Task task, bool positive) {
  std::vector<Template> out;
  const auto& specs = catalog();
  switch (task) {
    case Task::E:
      for (const auto& sp : specs) {
        if (positive)
          out.push_back({"E:" + sp.id(), [&sp](std::uint64_t s) { return gen_external_call(sp, s); }});
        else
          out.push_back({"E-neg:" + sp.id(), [&sp](std::uint64_t s) { return gen_external_call_negative(sp, s); }});
      }
      break;
    case Task::D: {
      const std::vector<DepId> ids =
          positive ? std::vector<DepId>{DepId::A_DIRECT, DepId::B_INDIRECT, DepId::C_CTRL} : std::vector<DepId>{DepId::Z_NONE};
      for (DepId id : ids)
        for (Direction dir : {Direction::E_TO_S, Direction::S_TO_E})
          for (const auto& sp : specs) {
            const DepRule rule = dep_rule(id, dir);
            if (!dependency_conflict(rule, sp).empty()) continue;
            out.push_back({std::string("D:") + to_string(id) + ":" + to_string(dir) + ":" + sp.id(),
                           [rule, &sp](std::uint64_t s) { return gen_dependency(rule, sp, s); }});
          }
      break;
    }
    case Task::O: {
      const std::vector<CeiType> types =
          positive ? std::vector<CeiType>{CeiType::SIMPLE_INT_BEFORE_EFFECT, CeiType::POST_INTERACTION_EFFECTS,
                                          CeiType::PATH_SENSITIVE_I_BEFORE_E}
                   : std::vector<CeiType>{CeiType::CEI_OK};
      for (CeiType t : types)
        for (const auto& sp : specs) {
          const CeiPattern pat = cei_pattern(t);
          out.push_back({std::string("O:") + to_string(t) + ":" + sp.id(),
                         [pat, &sp](std::uint64_t s) { return gen_ordering(pat, sp, s); }});
        }
      break;
    }
    case Task::Full: break;  // handled separately, bits drive the schedule
  }
  return out;
}

std::vector<const InterfaceSpec*> full_specs() {
  std::vector<const InterfaceSpec*> v;
  for (const auto& sp : catalog())
    if (sp.has_uint_param()) v.push_back(&sp);
  return v;
}

std::string bits_string(const FactorBits& b) {
  std::string s;
  for (int x : b) s += std::to_string(x);
  return s;
}

}  // namespace

void CorpusConfig::validate() const {
  if (count == 0) throw Error("InvalidParams", "corpus size must be positive");
  if (!(pos_ratio >= 0) || !(neg_ratio >= 0) || pos_ratio + neg_ratio <= 0)
    throw Error("InvalidParams", "class ratios must be non-negative and not both zero");
  if (max_attempts < 1) throw Error("InvalidParams", "max_attempts must be at least 1");
  if (factorial && task != Task::Full) throw Error("InvalidParams", "the factorial design applies to the FULL task only");
}

std::size_t positive_count(std::size_t count, double pos_ratio, double neg_ratio) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(count) * pos_ratio / (pos_ratio + neg_ratio)));
}

const std::vector<FactorBits>& full_negative_bits() {
  static const std::vector<FactorBits> v = [] {
    std::vector<FactorBits> out = {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int m = 0; m < 16; ++m) {
      FactorBits b = {(m >> 3) & 1, (m >> 2) & 1, (m >> 1) & 1, m & 1};
      if (b == FactorBits{1, 1, 1, 1}) continue;
      if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    }
    return out;
  }();
  return v;
}

nlohmann::json to_json(const Manifest& m) {
  nlohmann::json j;
  j["task"] = to_string(m.task);
  j["seed"] = m.seed;
  j["count"] = m.count;
  j["positives"] = m.positives;
  j["negatives"] = m.negatives;
  j["rejected"] = m.rejected;
  j["repeated_signatures"] = m.repeated_signatures;
  j["templates"] = m.templates;
  if (!m.factor_marginals.empty()) {
    j["factor_marginals"] = {{"E", m.factor_marginals[0]},
                             {"S", m.factor_marginals[1]},
                             {"D", m.factor_marginals[2]},
                             {"O", m.factor_marginals[3]}};
    j["rank_certificate"] = m.certificate;
  }
  return j;
}

Corpus gen_corpus(const CorpusConfig& cfg) {
  cfg.validate();
  Corpus out;
  auto& man = out.manifest;
  man.task = cfg.task;
  man.seed = cfg.seed;
  man.count = cfg.count;
  man.positives = positive_count(cfg.count, cfg.pos_ratio, cfg.neg_ratio);
  man.negatives = cfg.count - man.positives;

  // Slot schedule: each slot lists its preferred template first and the
  // fallbacks of the same class after it, used once an axis space is spent.
  std::vector<std::vector<Template>> slots;
  if (cfg.task == Task::Full) {
    const auto specs = full_specs();
    std::size_t k = 0;
    auto add = [&](const FactorBits& b) {
      std::vector<Template> cands;
      for (std::size_t j = 0; j < specs.size(); ++j) {
        const InterfaceSpec* sp = specs[(k + j) % specs.size()];
        cands.push_back({"FULL:" + bits_string(b) + ":" + sp->id(),
                         [b, sp](std::uint64_t s) { return gen_full(b, *sp, s); }});
      }
      ++k;
      slots.push_back(std::move(cands));
    };
    if (cfg.factorial) {
      man.positives = 0;
      for (std::size_t i = 0; i < cfg.count; ++i) {
        const int m = static_cast<int>(i % 16);
        const FactorBits b = {(m >> 3) & 1, (m >> 2) & 1, (m >> 1) & 1, m & 1};
        if (m == 15) ++man.positives;
        add(b);
      }
      man.negatives = cfg.count - man.positives;
    } else {
      for (std::size_t i = 0; i < man.positives; ++i) add({1, 1, 1, 1});
      const auto& neg = full_negative_bits();
      for (std::size_t i = 0; i < man.negatives; ++i) add(neg[i % neg.size()]);
    }
  } else {
    for (bool positive : {true, false}) {
      auto tpls = templates_for(cfg.task, positive);
      // Seeded template order so small corpora still cover varied templates.
      auto rng = detail::make_rng(cfg.seed, positive ? "order+" : "order-");
      std::shuffle(tpls.begin(), tpls.end(), rng);
      const std::size_t want = positive ? man.positives : man.negatives;
      for (std::size_t i = 0; i < want; ++i) {
        std::vector<Template> cands;
        for (std::size_t j = 0; j < tpls.size(); ++j) cands.push_back(tpls[(i + j) % tpls.size()]);
        slots.push_back(std::move(cands));
      }
    }
  }

  std::map<std::string, std::set<std::string>> seen;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    std::optional<LabeledSample> chosen, fallback;
    std::string chosen_id, fallback_id;
    for (const auto& tpl : slots[i]) {
      for (int attempt = 0; attempt < cfg.max_attempts && !chosen; ++attempt) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(attempt)};
        std::mt19937_64 rng(seq);
        LabeledSample s = tpl.make(rng());
        if (!validate(s).ok()) {
          ++man.rejected;
          continue;
        }
        if (!seen[tpl.id].count(s.structural_signature())) {
          chosen = std::move(s);
          chosen_id = tpl.id;
        } else if (!fallback) {
          fallback = std::move(s);
          fallback_id = tpl.id;
        }
      }
      if (chosen) break;
    }
    if (!chosen && fallback) {
      chosen = std::move(fallback);
      chosen_id = fallback_id;
      ++man.repeated_signatures;
    }
    if (!chosen) throw Error("GenerationFailed", "no valid sample for slot " + std::to_string(i));
    seen[chosen_id].insert(chosen->structural_signature());
    ++man.templates[chosen_id];
    out.samples.push_back(std::move(*chosen));
  }

  if (cfg.task == Task::Full) {
    man.factor_marginals.assign(4, 0.0);
    std::set<std::string> need = {"0000", "1000", "0100", "0010", "0001"};
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      const auto& b = *out.samples[i].labels.factor_bits;
      for (int k = 0; k < 4; ++k) man.factor_marginals[static_cast<std::size_t>(k)] += b[static_cast<std::size_t>(k)];
      if (need.erase(bits_string(b))) man.certificate.push_back(i);
    }
    for (double& m : man.factor_marginals) m /= static_cast<double>(out.samples.size());
  }
  return out;
}

}  // namespace factorscan::datagen
