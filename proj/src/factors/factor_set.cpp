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

#include "factorscan/factors/factor_set.hpp"

#include <nlohmann/json.hpp>

namespace factorscan {

const char* to_string(DepKind k) {
  switch (k) {
    case DepKind::None: return "NONE";
    case DepKind::Direct: return "DIRECT";
    case DepKind::Indirect: return "INDIRECT";
    case DepKind::Ctrl: return "CTRL";
  }
  return "?";
}

const char* to_string(UnitKind k) { return k == UnitKind::Line ? "line" : "block"; }

FactorSet FactorSet::zeros(int n, UnitKind kind) {
  FactorSet fs;
  fs.n_units = n;
  fs.unit_kind = kind;
  fs.phi_E = BitVector::Zero(n);
  fs.phi_S = BitVector::Zero(n);
  fs.phi_D = Int8Matrix::Zero(n, n);
  fs.phi_O = Int8Matrix::Zero(n, n);
  fs.dep_kind = Int8Matrix::Zero(n, n);
  fs.call_kind.assign(n, std::nullopt);
  fs.in_branch.assign(n, 0);
  return fs;
}

bool FactorSet::same_factors(const FactorSet& o) const {
  return n_units == o.n_units && unit_kind == o.unit_kind && phi_E == o.phi_E &&
         phi_S == o.phi_S && phi_D == o.phi_D && phi_O == o.phi_O && dep_kind == o.dep_kind;
}

std::vector<std::string> FactorSet::invariant_violations() const {
  std::vector<std::string> out;
  auto at = [&](int c, int u) {
    return "(" + std::to_string(label(c)) + "," + std::to_string(label(u)) + ")";
  };
  for (int c = 0; c < n_units; ++c) {
    for (int u = 0; u < n_units; ++u) {
      int d = phi_D(c, u), o = phi_O(c, u), k = dep_kind(c, u);
      if (o != 0 && d != 1) out.push_back("phi_O nonzero without dependency at " + at(c, u));
      if (d == 1 && !(phi_E(c) == 1 && phi_S(u) == 1))
        out.push_back("dependency without call/update at " + at(c, u));
      if ((k == 0) != (d == 0)) out.push_back("dep_kind disagrees with phi_D at " + at(c, u));
      if (o < -1 || o > 1 || d < 0 || d > 1) out.push_back("value out of range at " + at(c, u));
    }
  }
  return out;
}

std::string to_json(const FactorSet& fs, int indent) {
  using nlohmann::json;
  const int n = fs.n_units;
  json j;
  j["n_units"] = n;
  j["unit_kind"] = to_string(fs.unit_kind);
  std::vector<int> e(n), s(n);
  for (int i = 0; i < n; ++i) {
    e[i] = fs.phi_E(i);
    s[i] = fs.phi_S(i);
  }
  j["phi_E"] = e;
  j["phi_S"] = s;
  json deps = json::array();
  for (int c = 0; c < n; ++c)
    for (int u = 0; u < n; ++u)
      if (fs.phi_D(c, u))
        deps.push_back({{"c", fs.label(c)},
                        {"u", fs.label(u)},
                        {"phi_D", 1},
                        {"phi_O", fs.phi_O(c, u)},
                        {"kind", to_string(static_cast<DepKind>(fs.dep_kind(c, u)))}});
  j["dependencies"] = deps;
  json dm = json::array(), om = json::array();
  for (int c = 0; c < n; ++c) {
    std::vector<int> drow(n), orow(n);
    for (int u = 0; u < n; ++u) {
      drow[u] = fs.phi_D(c, u);
      orow[u] = fs.phi_O(c, u);
    }
    dm.push_back(drow);
    om.push_back(orow);
  }
  j["phi_D"] = dm;
  j["phi_O"] = om;
  json calls = json::array();
  for (int i = 0; i < n; ++i)
    if (fs.call_kind[i]) calls.push_back({{"unit", fs.label(i)}, {"opcode", minisol::to_string(*fs.call_kind[i])}});
  j["calls"] = calls;
  json w = json::array();
  for (const auto& x : fs.witnesses) w.push_back({{"c", fs.label(x.c)}, {"u", fs.label(x.u)}, {"path", x.path}});
  j["witnesses"] = w;
  return j.dump(indent);
}

}  // namespace factorscan
