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

#include "factorscan/factors/factor_set.hpp"
#include "factorscan/factors/program.hpp"

namespace factorscan {

struct AnalysisOptions {
  /// Drop control dependencies from phi_D (the `--deps=data-only` ablation).
  bool data_only = false;
};

/// Units holding an external call (interface, cast-and-call or low-level).
BitVector external_call_units(const ProgramUnit& p);

/// Units writing contract state, including mapping and array elements.
BitVector state_update_units(const ProgramUnit& p);

struct DependencyResult {
  Int8Matrix phi_D;
  Int8Matrix dep_kind;
  std::vector<FactorWitness> witnesses;
};

/// phi_D and its kind, DIRECT over INDIRECT over CTRL.
DependencyResult dependency_matrix(const ProgramUnit& p, const AnalysisOptions& opt = {});

/// phi_O for dependent pairs: -1 if some path runs the call first, +1 if
/// every path runs the update first with its value intact, 0 otherwise.
Int8Matrix ordering_matrix(const ProgramUnit& p, const Int8Matrix& phi_D);

/// All four factors plus metadata.
FactorSet analyze(const ProgramUnit& p, const AnalysisOptions& opt = {});

namespace detail {

/// Folds statement-pair results into one line-pair cell. Shared by the
/// analyzer and the oracle so both aggregate identically.
struct PairCell {
  DepKind kind = DepKind::None;
  bool any_call_first = false;
  bool any_update_first = false;
  bool any_clobbered = false;

  void add(DepKind k, int order);  // order: -1 call first, +1 intact, 0 clobbered
  std::int8_t phi_O() const;
};

}  // namespace detail

}  // namespace factorscan
