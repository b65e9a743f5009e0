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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorscan/fusion/model.hpp"
#include "factorscan/fusion/train.hpp"
#include "factorscan/scoring/scoring.hpp"

namespace factorscan::harness {

/// Settings of the class-prior experiment.
struct PriorShiftSettings {
  std::vector<std::pair<double, double>> ratios = {{1.0, 2.0}, {0.5, 0.95}};
  std::size_t train_count = 600;
  std::size_t eval_count = 400;       // held out, balanced
  std::uint64_t eval_seed = 0x5eed;
  double checkpoint_fraction = 0.1;   // evaluate every 10% of the steps
};

/// Everything a run needs. Paths are checked by validate().
struct RunConfig {
  std::vector<std::string> inputs;
  std::string task = "FULL";
  std::string output_dir = ".";
  double threshold = 0.5;
  bool findings_exit = true;  // analyze/ingest-ir exit 1 when something is flagged
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  ScoreParams scoring;
  int hidden = fusion::kDefaultHidden;
  fusion::TrainConfig train;
  fusion::GateParams<double> gate;  // only the configuration fields are read
  PriorShiftSettings prior_shift;
  /// Accepted for compatibility with the training recipe's signature; no
  /// step reads it. Callers warn when it is set.
  std::optional<double> delta;

  /// Throws Error("MissingPath") / Error("InvalidParams").
  void validate() const;
};

inline constexpr const char* kEnvPrefix = "FACTORSCAN_";

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; throws Error("InvalidConfig").
RunConfig config_from_json(const nlohmann::json& j);

/// Applies FACTORSCAN_* variables onto a config document. The rest of the
/// name is lower-cased and split on "__" into a nested path, so
/// FACTORSCAN_FUSION__LEARNING_RATE sets /fusion/learning_rate. Values are
/// parsed as JSON when possible and taken as strings otherwise.
nlohmann::json apply_env_overrides(nlohmann::json doc, const std::map<std::string, std::string>& env);

/// The process environment restricted to the prefix.
std::map<std::string, std::string> prefixed_environment();

/// Reads `path` (may be empty for defaults), then the environment.
RunConfig load_config(const std::string& path);

}  // namespace factorscan::harness
