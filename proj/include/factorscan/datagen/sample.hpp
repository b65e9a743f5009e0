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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorscan/factors/factor_set.hpp"

namespace factorscan::datagen {

enum class Task { E, D, O, Full };

enum class DepId { A_DIRECT, B_INDIRECT, C_CTRL, Z_NONE };
enum class Direction { E_TO_S, S_TO_E };

struct DepRule {
  DepId dep_id = DepId::A_DIRECT;
  Direction direction = Direction::E_TO_S;
  bool requires_transformation = false;
  std::vector<std::string> forbidden_patterns;
};

/// The table row for `id` in the given direction.
DepRule dep_rule(DepId id, Direction dir);

enum class CeiType { CEI_OK, SIMPLE_INT_BEFORE_EFFECT, POST_INTERACTION_EFFECTS, PATH_SENSITIVE_I_BEFORE_E };

struct CeiPattern {
  bool good = true;  // GOOD vs RISK
  CeiType type_id = CeiType::CEI_OK;
  std::vector<minisol::AnchorKind> anchor_sequence;
};

CeiPattern cei_pattern(CeiType t);

const char* to_string(Task t);
const char* to_string(DepId d);
const char* to_string(Direction d);
const char* to_string(CeiType t);
Task parse_task(const std::string& s);
DepId parse_dep_id(const std::string& s);
Direction parse_direction(const std::string& s);
CeiType parse_cei_type(const std::string& s);

/// Factor bits in (E, S, D, O) order.
using FactorBits = std::array<int, 4>;

/// Task-specific ground truth; fields not used by a task stay empty.
struct Labels {
  int label = 0;  // binary class used for priors: call present / dependent / risky / vulnerable
  std::vector<int> call_lines;
  std::vector<int> update_lines;
  std::optional<int> check_line;
  std::optional<DepId> dep_id;
  std::optional<Direction> direction;
  std::optional<DepKind> dep_kind;
  std::optional<CeiType> cei_type;
  std::optional<bool> vulnerable;
  std::optional<FactorBits> factor_bits;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string template_id;
  std::map<std::string, std::string> axes;  // every axis value used
  std::vector<std::string> axes_hit;        // axes set away from their baseline value
  std::string interface_id;
  bool with_cfg_context = false;
};

struct LabeledSample {
  std::string source;
  Task task = Task::E;
  Labels labels;
  Provenance provenance;

  /// Axis tuple without identifier choices; two samples of one template
  /// must differ here.
  std::string structural_signature() const;
};

nlohmann::json to_json(const LabeledSample& s);
LabeledSample sample_from_json(const nlohmann::json& j);

}  // namespace factorscan::datagen
