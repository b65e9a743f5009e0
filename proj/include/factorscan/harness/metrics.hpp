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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace factorscan::harness {

struct Prediction {
  double score = 0.0;
  int label = 0;
};

enum class ReportMode {
  Auto,        // recall-only when the set has no negatives
  Full,
  RecallOnly,  // precision-based metrics are not applicable
};

/// Confusion counts and the metrics derived from them. Undefined ratios
/// stay empty instead of defaulting to 0.
struct MetricsReport {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> precision, recall, f1;
  double accuracy = 0.0;
  std::optional<double> auroc;
  bool recall_only = false;

  long long total() const { return tp + fp + fn + tn; }
};

MetricsReport metrics_from_confusion(long long tp, long long fp, long long fn, long long tn,
                                     ReportMode mode = ReportMode::Auto);

/// Counts at `score >= threshold`, plus AUROC when both classes occur.
/// Throws Error("InvalidLabel") / Error("NonFiniteScore").
MetricsReport compute_metrics(const std::vector<Prediction>& preds, double threshold = 0.5,
                              ReportMode mode = ReportMode::Auto);

/// Mann-Whitney statistic with tied scores counted one half.
/// Throws Error("SingleClass") when a class is missing.
double auroc(const std::vector<Prediction>& preds);

nlohmann::json to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);

/// "tp,fp,fn,tn,precision,recall,f1,accuracy,auroc"; empty cells for absent values.
std::string csv_header();
std::string to_csv_row(const MetricsReport& m);

}  // namespace factorscan::harness
