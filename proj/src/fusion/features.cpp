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


#include "factorscan/fusion/features.hpp"

#include <istream>
#include <ostream>

namespace factorscan::fusion {

const std::array<std::array<const char*, kDefaultHidden>, kBranches> kFeatureNames = {{
    {"calls_per_unit", "first_call", "last_call", "share_high_level", "share_call",
     "share_low_level", "share_delegate_static", "share_calls_branched"},
    {"updates_per_unit", "first_update", "last_update", "mean_update", "share_updates_branched",
     "share_after_first_call", "share_before_first_call", "any_update"},
    {"dependency_density", "share_direct", "share_indirect", "share_ctrl", "share_calls_dependent",
     "share_updates_dependent", "any_dependency", "dependencies_per_unit"},
    {"share_call_first", "earliest_call_first", "path_sensitive", "share_update_first",
     "share_unordered", "any_call_first", "share_calls_call_first", "call_first_density"},
}};

namespace {

bool branched(const FactorSet& fs, int i) {
  return i < int(fs.in_branch.size()) && fs.in_branch[i] != 0;
}

}  // namespace

BranchFeatures<double> extract_branch_features(const FactorSet& fs) {
  BranchFeatures<double> x(kDefaultHidden);
  const int n = fs.n_units;
  if (n == 0) return x;
  const double N = n;
  auto pos = [&](int i) { return (i + 1) / N; };

  std::vector<int> calls, updates;
  for (int i = 0; i < n; ++i) {
    if (fs.phi_E(i)) calls.push_back(i);
    if (fs.phi_S(i)) updates.push_back(i);
  }

  auto zE = x.z(0);
  if (!calls.empty()) {
    const double nc = double(calls.size());
    zE(0) = nc / N;
    zE(1) = pos(calls.front());
    zE(2) = pos(calls.back());
    for (int c : calls) {
      const auto kind = c < int(fs.call_kind.size()) ? fs.call_kind[c] : std::nullopt;
      if (kind) {
        switch (*kind) {
          case minisol::CallKind::HighLevel: zE(3) += 1; break;
          case minisol::CallKind::Call: zE(4) += 1; break;
          case minisol::CallKind::LowLevel: zE(5) += 1; break;
          case minisol::CallKind::DelegateCall:
          case minisol::CallKind::StaticCall: zE(6) += 1; break;
        }
      }
      if (branched(fs, c)) zE(7) += 1;
    }
    zE.segment(3, 5) /= nc;
  }

  auto zS = x.z(1);
  if (!updates.empty()) {
    const double nu = double(updates.size());
    zS(0) = nu / N;
    zS(1) = pos(updates.front());
    zS(2) = pos(updates.back());
    for (int u : updates) {
      zS(3) += pos(u);
      if (branched(fs, u)) zS(4) += 1;
      if (!calls.empty() && u > calls.front()) zS(5) += 1;
      if (!calls.empty() && u < calls.front()) zS(6) += 1;
    }
    zS.segment(3, 4) /= nu;
    zS(7) = 1.0;
  }

  auto zD = x.z(2);
  auto zO = x.z(3);
  const double candidates = double(calls.size() * updates.size());
  if (candidates > 0) {
    double deps = 0, neg = 0, pos_first = 0, zero = 0;
    std::array<double, 4> kinds{};
    std::vector<char> call_dep(n, 0), upd_dep(n, 0), call_neg(n, 0);
    int earliest = -1;
    bool path_sensitive = false;
    for (int c : calls) {
      for (int u : updates) {
        if (!fs.phi_D(c, u)) continue;
        deps += 1;
        kinds[std::clamp<int>(fs.dep_kind(c, u), 0, 3)] += 1;
        call_dep[c] = upd_dep[u] = 1;
        const int o = fs.phi_O(c, u);
        if (o < 0) {
          neg += 1;
          call_neg[c] = 1;
          if (earliest < 0 || c < earliest) earliest = c;
          if (branched(fs, c) || branched(fs, u)) path_sensitive = true;
        } else if (o > 0) {
          pos_first += 1;
        } else {
          zero += 1;
        }
      }
    }
    zD(0) = deps / candidates;
    if (deps > 0) {
      zD(1) = kinds[1] / deps;
      zD(2) = kinds[2] / deps;
      zD(3) = kinds[3] / deps;
      zD(6) = 1.0;
      zO(0) = neg / deps;
      zO(3) = pos_first / deps;
      zO(4) = zero / deps;
    }
    double cd = 0, ud = 0, cn = 0;
    for (int c : calls) cd += call_dep[c], cn += call_neg[c];
    for (int u : updates) ud += upd_dep[u];
    zD(4) = cd / double(calls.size());
    zD(5) = ud / double(updates.size());
    zD(7) = deps / N;
    if (earliest >= 0) zO(1) = pos(earliest);
    zO(2) = path_sensitive ? 1.0 : 0.0;
    zO(5) = neg > 0 ? 1.0 : 0.0;
    zO(6) = cn / double(calls.size());
    zO(7) = neg / candidates;
  }
  return x;
}

nlohmann::json features_to_json(const BranchFeatures<double>& x) {
  nlohmann::json j = nlohmann::json::object();
  for (int k = 0; k < kBranches; ++k) {
    std::vector<double> v(x.z(k).data(), x.z(k).data() + x.dim());
    j[kBranchNames[k]] = v;
  }
  return j;
}

BranchFeatures<double> features_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("InvalidFeatures", "features must be an object");
  Eigen::Index H = -1;
  BranchFeatures<double> x;
  for (int k = 0; k < kBranches; ++k) {
    const char* name = kBranchNames[k];
    if (!j.contains(name) || !j[name].is_array())
      throw Error("InvalidFeatures", std::string("missing branch ") + name);
    const auto v = j[name].get<std::vector<double>>();
    if (H < 0) {
      H = Eigen::Index(v.size());
      x = BranchFeatures<double>(H);
    } else if (Eigen::Index(v.size()) != H) {
      throw Error("InvalidFeatures", "branch dimensions differ");
    }
    for (Eigen::Index i = 0; i < H; ++i) x.Z(i, k) = v[i];
  }
  if (!x.Z.allFinite()) throw Error("InvalidFeatures", "non-finite feature value");
  return x;
}

std::vector<LabeledSample> read_dataset_jsonl(std::istream& in) {
  std::vector<LabeledSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("InvalidDataset", "line " + std::to_string(lineno) + ": " + e.what());
    }
    LabeledSample s;
    s.sample.x = features_from_json(j.at("features"));
    s.sample.label = j.at("label").get<int>();
    if (s.sample.label != 0 && s.sample.label != 1)
      throw Error("InvalidLabel", "line " + std::to_string(lineno) + ": label must be 0 or 1");
    if (j.contains("meta")) s.meta = j["meta"];
    out.push_back(std::move(s));
  }
  return out;
}

void write_dataset_jsonl(std::ostream& out, const std::vector<LabeledSample>& data) {
  for (const auto& s : data) {
    nlohmann::json j;
    j["features"] = features_to_json(s.sample.x);
    j["label"] = s.sample.label;
    j["meta"] = s.meta;
    out << j.dump() << '\n';
  }
}

namespace {

std::vector<double> to_vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Simplex<double> simplex_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != kBranches) throw Error("InvalidCheckpoint", "branch vector needs 4 entries");
  return Simplex<double>(v[0], v[1], v[2], v[3]);
}

}  // namespace

nlohmann::json gate_to_json(const GateParams<double>& gp) {
  nlohmann::json j;
  for (int k = 0; k < kBranches; ++k)
    j[std::string("u_") + kBranchNames[k]] = to_vec(gp.U.col(k));
  j["c"] = to_vec(gp.c);
  j["tau_gate"] = gp.tau_gate;
  j["mask"] = std::vector<int>(gp.mask.data(), gp.mask.data() + kBranches);
  j["prior"] = gp.prior ? nlohmann::json(to_vec(*gp.prior)) : nlohmann::json(nullptr);
  j["prior_mixing"] = gp.prior_mixing;
  j["fixed_alpha"] = gp.fixed_alpha ? nlohmann::json(to_vec(*gp.fixed_alpha)) : nlohmann::json(nullptr);
  j["warmup_ratio"] = gp.warmup_ratio;
  j["lambda_jaco"] = gp.lambda_jaco;
  return j;
}

GateParams<double> gate_from_json(const nlohmann::json& j, Eigen::Index H) {
  GateParams<double> gp(H);
  for (int k = 0; k < kBranches; ++k) {
    const auto u = j.at(std::string("u_") + kBranchNames[k]).get<std::vector<double>>();
    if (Eigen::Index(u.size()) != H) throw Error("InvalidCheckpoint", "gate width differs from head");
    for (Eigen::Index i = 0; i < H; ++i) gp.U(i, k) = u[i];
  }
  gp.c = simplex_from(j.at("c"));
  gp.tau_gate = j.at("tau_gate").get<double>();
  const auto m = j.at("mask").get<std::vector<int>>();
  if (m.size() != kBranches) throw Error("InvalidCheckpoint", "mask needs 4 entries");
  for (int k = 0; k < kBranches; ++k) gp.mask[k] = m[k];
  if (j.contains("prior") && !j["prior"].is_null()) gp.prior = simplex_from(j["prior"]);
  gp.prior_mixing = j.value("prior_mixing", false);
  if (j.contains("fixed_alpha") && !j["fixed_alpha"].is_null()) gp.fixed_alpha = simplex_from(j["fixed_alpha"]);
  gp.warmup_ratio = j.value("warmup_ratio", 0.1);
  gp.lambda_jaco = j.value("lambda_jaco", 0.1);
  gp.validate();
  return gp;
}

nlohmann::json checkpoint_to_json(const Model<double>& m, const TrainConfig& cfg) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["hidden"] = m.dim();
  j["gate"] = gate_to_json(m.gate);
  j["head"] = {{"w", to_vec(m.head.w)}, {"b", m.head.b}};
  j["config"] = {{"learning_rate", cfg.learning_rate},
                 {"total_steps", cfg.total_steps},
                 {"batch_size", cfg.batch_size},
                 {"seed", cfg.seed},
                 {"beta1", cfg.beta1},
                 {"beta2", cfg.beta2},
                 {"adam_eps", cfg.adam_eps},
                 {"weight_decay", cfg.weight_decay},
                 {"sensitivity", cfg.jaco.sensitivity == Sensitivity::Total ? "total" : "fusion-only"},
                 {"kl_target", cfg.jaco.target == KlTarget::Full ? "full" : "detached"}};
  return j;
}

Model<double> checkpoint_from_json(const nlohmann::json& j, TrainConfig* cfg) {
  try {
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error("InvalidCheckpoint", "unsupported checkpoint version");
    Model<double> m;
    const auto w = j.at("head").at("w").get<std::vector<double>>();
    m.head.w = Eigen::Map<const Eigen::VectorXd>(w.data(), Eigen::Index(w.size()));
    m.head.b = j.at("head").at("b").get<double>();
    m.gate = gate_from_json(j.at("gate"), m.head.w.size());
    if (cfg && j.contains("config")) {
      const auto& c = j["config"];
      cfg->learning_rate = c.value("learning_rate", cfg->learning_rate);
      cfg->total_steps = c.value("total_steps", cfg->total_steps);
      cfg->batch_size = c.value("batch_size", cfg->batch_size);
      cfg->seed = c.value("seed", cfg->seed);
      cfg->beta1 = c.value("beta1", cfg->beta1);
      cfg->beta2 = c.value("beta2", cfg->beta2);
      cfg->adam_eps = c.value("adam_eps", cfg->adam_eps);
      cfg->weight_decay = c.value("weight_decay", cfg->weight_decay);
      cfg->jaco.sensitivity =
          c.value("sensitivity", std::string("total")) == "total" ? Sensitivity::Total : Sensitivity::FusionOnly;
      cfg->jaco.target = c.value("kl_target", std::string("full")) == "full" ? KlTarget::Full : KlTarget::Detached;
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidCheckpoint", e.what());
  }
}

}  // namespace factorscan::fusion
