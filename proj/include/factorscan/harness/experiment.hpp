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
#include <vector>

#include <nlohmann/json.hpp>

#include "factorscan/datagen/sample.hpp"
#include "factorscan/fusion/train.hpp"
#include "factorscan/harness/config.hpp"
#include "factorscan/harness/metrics.hpp"

namespace factorscan::harness {

/// Analyzer features with the sample's binary label.
std::vector<fusion::Sample<double>> featurize(const std::vector<datagen::LabeledSample>& samples);

std::vector<Prediction> predict_all(const fusion::Model<double>& model,
                                    const std::vector<fusion::Sample<double>>& data);

/// 1-based step counts at which a run is evaluated: every
/// ceil(fraction * T) steps, plus the final step.
std::vector<int> checkpoint_steps(int total_steps, double fraction);

struct Trajectory {
  double pos_ratio = 1.0;
  double neg_ratio = 1.0;
  std::uint64_t seed = 0;
  std::vector<int> steps;
  std::vector<double> auroc;
};

/// Trains from `seed` and evaluates AUROC on `eval` at each checkpoint.
/// Throws Error("SingleClass") when either set lacks a class.
Trajectory train_with_checkpoints(const std::vector<fusion::Sample<double>>& train_set,
                                  const std::vector<fusion::Sample<double>>& eval_set, const RunConfig& cfg,
                                  std::uint64_t seed);

struct PriorShiftReport {
  std::vector<Trajectory> runs;
  std::vector<std::vector<double>> ratio_means;  // per ratio, mean over seeds per checkpoint
  double mean_deviation = 0.0;          // mean |difference| of ratio means, over checkpoints and ratio pairs
  double max_pairwise_deviation = 0.0;  // largest |difference| between any two runs at one checkpoint
  double min_final_auroc = 0.0;
};

/// FULL-task corpora at each configured ratio, one run per (ratio, seed),
/// scored against one held-out balanced corpus.
PriorShiftReport run_prior_shift(const RunConfig& cfg);

nlohmann::json to_json(const PriorShiftReport& r);

}  // namespace factorscan::harness
