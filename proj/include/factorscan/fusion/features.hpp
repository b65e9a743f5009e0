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


#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorscan/factors/factor_set.hpp"
#include "factorscan/fusion/model.hpp"
#include "factorscan/fusion/train.hpp"

namespace factorscan::fusion {

/// Frozen feature layout, H = 8 per branch. Positions are (unit + 1) / N.
///
///   E: calls/N, first call, last call, share HIGH_LEVEL, share CALL,
///      share LOW_LEVEL, share DELEGATECALL+STATICCALL, share of calls in a branch
///   S: updates/N, first update, last update, mean position, share in a branch,
///      share after the first call, share before the first call, any update
///   D: dependent pairs / candidate pairs, share DIRECT, share INDIRECT,
///      share CTRL, share of calls with a dependent update, share of updates
///      with a dependent call, any dependency, dependent pairs / N
///   O: share of -1 among dependent pairs, earliest call with a -1 pair,
///      path-sensitive flag (a -1 pair touching a branched unit), share of +1,
///      share of 0, any -1, share of calls owning a -1 pair, -1 pairs / candidates
extern const std::array<std::array<const char*, kDefaultHidden>, kBranches> kFeatureNames;

BranchFeatures<double> extract_branch_features(const FactorSet& fs);

/// {"E": [...], "S": [...], "D": [...], "O": [...]}
nlohmann::json features_to_json(const BranchFeatures<double>& x);
BranchFeatures<double> features_from_json(const nlohmann::json& j);

struct LabeledSample {
  Sample<double> sample;
  nlohmann::json meta = nlohmann::json::object();
};

/// One {features, label, meta} object per line.
std::vector<LabeledSample> read_dataset_jsonl(std::istream& in);
void write_dataset_jsonl(std::ostream& out, const std::vector<LabeledSample>& data);

inline constexpr int kCheckpointVersion = 1;

/// Version-tagged JSON with gate.u_E ... gate.c, head.w, head.b and config.
nlohmann::json checkpoint_to_json(const Model<double>& m, const TrainConfig& cfg);
Model<double> checkpoint_from_json(const nlohmann::json& j, TrainConfig* cfg = nullptr);

nlohmann::json gate_to_json(const GateParams<double>& gp);
GateParams<double> gate_from_json(const nlohmann::json& j, Eigen::Index H);

}  // namespace factorscan::fusion
