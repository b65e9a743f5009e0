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

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "factorscan/minisol/ast.hpp"

namespace factorscan {

using BitVector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;
using Int8Matrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class UnitKind { Line, Block };

/// Dependency categories; NONE iff phi_D is 0.
enum class DepKind : std::int8_t { None = 0, Direct = 1, Indirect = 2, Ctrl = 3 };

const char* to_string(DepKind k);
const char* to_string(UnitKind k);

struct FactorWitness {
  int c = 0;
  int u = 0;
  std::string path;
  friend bool operator==(const FactorWitness&, const FactorWitness&) = default;
};

/// The four factor functions over N units. Matrices are indexed [c, u]
/// with c the call unit and u the update unit. For line units, unit i is
/// source line i + 1.
struct FactorSet {
  int n_units = 0;
  UnitKind unit_kind = UnitKind::Line;
  BitVector phi_E;
  BitVector phi_S;
  Int8Matrix phi_D;
  Int8Matrix phi_O;     // values in {-1, 0, +1}
  Int8Matrix dep_kind;  // DepKind values

  // Metadata used by feature extraction and reports.
  std::vector<std::optional<minisol::CallKind>> call_kind;  // per unit
  std::vector<std::uint8_t> in_branch;                       // per unit
  std::vector<FactorWitness> witnesses;

  static FactorSet zeros(int n, UnitKind kind = UnitKind::Line);

  /// Public label of a unit: source line for line units, block id otherwise.
  int label(int unit) const { return unit_kind == UnitKind::Line ? unit + 1 : unit; }

  /// Exact equality of the factor values (metadata excluded).
  bool same_factors(const FactorSet& o) const;

  /// Human-readable descriptions of every violated structural invariant.
  std::vector<std::string> invariant_violations() const;
};

/// JSON mirroring the record vocabulary plus explicit phi arrays.
std::string to_json(const FactorSet& fs, int indent = -1);

}  // namespace factorscan
