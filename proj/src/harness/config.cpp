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


#include "factorscan/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include "factorscan/error.hpp"

extern char** environ;

namespace factorscan::harness {

namespace {

std::vector<double> vec4(const fusion::Simplex<double>& v) { return {v(0), v(1), v(2), v(3)}; }

fusion::Simplex<double> simplex(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != fusion::kBranches) throw Error("InvalidConfig", "branch vectors need 4 entries");
  return fusion::Simplex<double>(v[0], v[1], v[2], v[3]);
}

}  // namespace

void RunConfig::validate() const {
  for (const auto& p : inputs)
    if (!std::filesystem::exists(p)) throw Error("MissingPath", "input path does not exist: " + p);
  if (hidden < 1) throw Error("InvalidParams", "hidden width must be positive");
  if (prior_shift.checkpoint_fraction <= 0 || prior_shift.checkpoint_fraction > 1)
    throw Error("InvalidParams", "checkpoint_fraction must lie in (0, 1]");
  scoring.validate();
  train.validate();
  gate.validate();
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["inputs"] = c.inputs;
  j["task"] = c.task;
  j["output_dir"] = c.output_dir;
  j["threshold"] = c.threshold;
  j["findings_exit"] = c.findings_exit;
  j["seeds"] = c.seeds;
  j["scoring"] = {{"alpha", c.scoring.alpha},
                  {"tau", c.scoring.tau},
                  {"sum_mode", c.scoring.sum_mode == SumMode::FullGrid ? "full_grid" : "candidate"}};
  const auto& t = c.train;
  const auto& g = c.gate;
  j["fusion"] = {{"hidden", c.hidden},
                 {"learning_rate", t.learning_rate},
                 {"total_steps", t.total_steps},
                 {"batch_size", t.batch_size},
                 {"seed", t.seed},
                 {"beta1", t.beta1},
                 {"beta2", t.beta2},
                 {"adam_eps", t.adam_eps},
                 {"weight_decay", t.weight_decay},
                 {"sensitivity", t.jaco.sensitivity == fusion::Sensitivity::Total ? "total" : "fusion-only"},
                 {"kl_target", t.jaco.target == fusion::KlTarget::Full ? "full" : "detached"},
                 {"tau_gate", g.tau_gate},
                 {"lambda_jaco", g.lambda_jaco},
                 {"warmup_ratio", g.warmup_ratio},
                 {"mask", std::vector<int>(g.mask.data(), g.mask.data() + fusion::kBranches)},
                 {"prior", g.prior ? nlohmann::json(vec4(*g.prior)) : nlohmann::json()},
                 {"prior_mixing", g.prior_mixing},
                 {"fixed_alpha", g.fixed_alpha ? nlohmann::json(vec4(*g.fixed_alpha)) : nlohmann::json()},
                 {"delta", c.delta ? nlohmann::json(*c.delta) : nlohmann::json()}};
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& [p, n] : c.prior_shift.ratios) ratios.push_back({p, n});
  j["prior_shift"] = {{"ratios", ratios},
                      {"train_count", c.prior_shift.train_count},
                      {"eval_count", c.prior_shift.eval_count},
                      {"eval_seed", c.prior_shift.eval_seed},
                      {"checkpoint_fraction", c.prior_shift.checkpoint_fraction}};
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.inputs = j.value("inputs", c.inputs);
    c.task = j.value("task", c.task);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.threshold = j.value("threshold", c.threshold);
    c.findings_exit = j.value("findings_exit", c.findings_exit);
    c.seeds = j.value("seeds", c.seeds);
    if (j.contains("scoring")) {
      const auto& s = j["scoring"];
      c.scoring.alpha = s.value("alpha", c.scoring.alpha);
      c.scoring.tau = s.value("tau", c.scoring.tau);
      const auto mode = s.value("sum_mode", std::string("candidate"));
      if (mode != "candidate" && mode != "full_grid") throw Error("InvalidConfig", "unknown sum_mode '" + mode + "'");
      c.scoring.sum_mode = mode == "full_grid" ? SumMode::FullGrid : SumMode::CandidateRestricted;
    }
    if (j.contains("fusion")) {
      const auto& f = j["fusion"];
      auto& t = c.train;
      auto& g = c.gate;
      c.hidden = f.value("hidden", c.hidden);
      t.learning_rate = f.value("learning_rate", t.learning_rate);
      t.total_steps = f.value("total_steps", t.total_steps);
      t.batch_size = f.value("batch_size", t.batch_size);
      t.seed = f.value("seed", t.seed);
      t.beta1 = f.value("beta1", t.beta1);
      t.beta2 = f.value("beta2", t.beta2);
      t.adam_eps = f.value("adam_eps", t.adam_eps);
      t.weight_decay = f.value("weight_decay", t.weight_decay);
      const auto sens = f.value("sensitivity", std::string("total"));
      if (sens != "total" && sens != "fusion-only") throw Error("InvalidConfig", "unknown sensitivity '" + sens + "'");
      t.jaco.sensitivity = sens == "total" ? fusion::Sensitivity::Total : fusion::Sensitivity::FusionOnly;
      const auto kl = f.value("kl_target", std::string("full"));
      if (kl != "full" && kl != "detached") throw Error("InvalidConfig", "unknown kl_target '" + kl + "'");
      t.jaco.target = kl == "full" ? fusion::KlTarget::Full : fusion::KlTarget::Detached;
      g.tau_gate = f.value("tau_gate", g.tau_gate);
      g.lambda_jaco = f.value("lambda_jaco", g.lambda_jaco);
      g.warmup_ratio = f.value("warmup_ratio", g.warmup_ratio);
      if (f.contains("mask")) {
        const auto m = f["mask"].get<std::vector<int>>();
        if (m.size() != fusion::kBranches) throw Error("InvalidConfig", "mask needs 4 entries");
        for (int k = 0; k < fusion::kBranches; ++k) g.mask[k] = m[static_cast<std::size_t>(k)];
      }
      if (f.contains("prior") && !f["prior"].is_null()) g.prior = simplex(f["prior"]);
      g.prior_mixing = f.value("prior_mixing", g.prior_mixing);
      if (f.contains("fixed_alpha") && !f["fixed_alpha"].is_null()) g.fixed_alpha = simplex(f["fixed_alpha"]);
      if (f.contains("delta") && !f["delta"].is_null()) c.delta = f["delta"].get<double>();
    }
    if (j.contains("prior_shift")) {
      const auto& p = j["prior_shift"];
      auto& ps = c.prior_shift;
      if (p.contains("ratios")) {
        ps.ratios.clear();
        for (const auto& r : p["ratios"]) ps.ratios.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
      }
      ps.train_count = p.value("train_count", ps.train_count);
      ps.eval_count = p.value("eval_count", ps.eval_count);
      ps.eval_seed = p.value("eval_seed", ps.eval_seed);
      ps.checkpoint_fraction = p.value("checkpoint_fraction", ps.checkpoint_fraction);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidConfig", e.what());
  }
  c.gate.U = fusion::BranchMatrix<double>::Zero(c.hidden, fusion::kBranches);
  return c;
}

nlohmann::json apply_env_overrides(nlohmann::json doc, const std::map<std::string, std::string>& env) {
  if (doc.is_null()) doc = nlohmann::json::object();
  const std::string prefix = kEnvPrefix;
  for (const auto& [name, raw] : env) {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) continue;
    std::string rest = name.substr(prefix.size());
    std::transform(rest.begin(), rest.end(), rest.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
    std::string pointer;
    for (std::size_t at = 0;;) {
      const auto sep = rest.find("__", at);
      pointer += "/" + rest.substr(at, sep == std::string::npos ? std::string::npos : sep - at);
      if (sep == std::string::npos) break;
      at = sep + 2;
    }
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    doc[nlohmann::json::json_pointer(pointer)] = value;
  }
  return doc;
}

std::map<std::string, std::string> prefixed_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = kv.substr(0, eq);
    if (name.rfind(kEnvPrefix, 0) == 0) out[name] = kv.substr(eq + 1);
  }
  return out;
}

RunConfig load_config(const std::string& path) {
  nlohmann::json doc = nlohmann::json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error("MissingPath", "cannot open config " + path);
    doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error("InvalidConfig", "config is not valid JSON: " + path);
  }
  return config_from_json(apply_env_overrides(std::move(doc), prefixed_environment()));
}

}  // namespace factorscan::harness
