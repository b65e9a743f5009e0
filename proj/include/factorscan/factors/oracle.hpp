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

#include "factorscan/factors/analyzer.hpp"

namespace factorscan {

inline constexpr int kOracleMaxBranches = 2;
inline constexpr int kOracleMaxLines = 25;

/// Recomputes the factors by enumerating every entry-to-exit path of each
/// function and simulating definitions along it. Independent of the
/// analyzer's graph queries; throws Error("TooLarge") past the size bound.
FactorSet brute_force_oracle(const ProgramUnit& p, const AnalysisOptions& opt = {});

}  // namespace factorscan
