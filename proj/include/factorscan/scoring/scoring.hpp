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
#include <cstddef>
#include <utility>
#include <vector>

#include "factorscan/factors/factor_set.hpp"

namespace factorscan {

enum class SumMode { FullGrid, CandidateRestricted };

/// Sharpness and threshold of the relaxed rule. `tau` here is a decision
/// offset, unrelated to the gate temperature of the fusion model.
struct ScoreParams {
  double alpha = 4.0;
  double tau = 2.0;
  SumMode sum_mode = SumMode::CandidateRestricted;

  void validate() const;  // throws Error("InvalidParams") unless alpha > 0
};

struct Verdict {
  bool vulnerable = false;
  std::vector<std::pair<int, int>> witnesses;  // (c, u) unit indices
};

struct SoftScore {
  double raw_f = 0.0;
  double centered_f = 0.0;
  double probability = 0.0;
  std::size_t candidates = 0;  // pairs with phi_E[c] = phi_S[u] = 1
  SumMode mode = SumMode::CandidateRestricted;

  /// The score fed to the sigmoid: raw in full-grid mode, centered otherwise.
  double f_used() const { return mode == SumMode::FullGrid ? raw_f : centered_f; }
};

/// Vulnerable iff some (c, u) has a call, an update, a dependency and the
/// call-first ordering.
Verdict boolean_rule(const FactorSet& fs);

/// 1 / (1 + exp(alpha * phi)), evaluated without overflow.
double soft_order(double phi_O, double alpha);

double sigmoid(double x);

SoftScore soft_score(const FactorSet& fs, const ScoreParams& params = {});

/// sigmoid(alpha * f_used - tau).
double predict(const SoftScore& score, const ScoreParams& params = {});

/// Score with phi_O treated as a continuous matrix (same shape as fs.phi_O).
double raw_score(const FactorSet& fs, const Eigen::MatrixXd& phi_O, const ScoreParams& params);

/// d raw_f / d phi_O, analytic.
Eigen::MatrixXd raw_score_gradient(const FactorSet& fs, const Eigen::MatrixXd& phi_O,
                                   const ScoreParams& params);

}  // namespace factorscan
