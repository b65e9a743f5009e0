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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorscan/factors/factor_set.hpp"
#include "factorscan/minisol/parser.hpp"
#include "factorscan/scoring/scoring.hpp"

namespace factorscan::harness {

/// Result for one source file. On failure only `error_code`/`error` are set.
struct FileReport {
  std::string path;
  bool ok = false;
  std::string error_code;
  std::string error;
  FactorSet factors;
  Verdict verdict;
  SoftScore score;
  double probability = 0.0;
  std::vector<minisol::Diagnostic> warnings;
};

/// `.sol` files under the given paths (files are taken as given), sorted
/// within each directory.
std::vector<std::string> collect_sources(const std::vector<std::string>& paths);

FileReport analyze_source(const std::string& path, const std::string& text, const ScoreParams& params);

/// Analyzes files on `workers` threads (0 picks the hardware count); the
/// output order follows `files` regardless of completion order.
std::vector<FileReport> analyze_files(const std::vector<std::string>& files, const ScoreParams& params,
                                      unsigned workers = 0);

/// Witness lines are reported as source line pairs.
nlohmann::json to_json(const FileReport& r);

}  // namespace factorscan::harness
