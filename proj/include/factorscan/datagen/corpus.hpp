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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorscan/datagen/generators.hpp"

namespace factorscan::datagen {

struct CorpusConfig {
  Task task = Task::Full;
  std::size_t count = 200;
  double pos_ratio = 1.0;  // positives : negatives
  double neg_ratio = 1.0;
  std::uint64_t seed = 0;
  /// Attempts per template slot before a repeated axis tuple is accepted.
  int max_attempts = 64;
  /// FULL only: cycle all 16 bit patterns evenly; the class ratio is then
  /// implied by the design (1 in 16) and the ratio fields are ignored.
  bool factorial = false;

  void validate() const;  // throws Error("InvalidParams")
};

struct Manifest {
  Task task = Task::Full;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t rejected = 0;          // generated but failed validation
  std::size_t repeated_signatures = 0;
  std::map<std::string, std::size_t> templates;  // template id -> samples
  std::vector<double> factor_marginals;          // FULL only, (E,S,D,O) means
  std::vector<std::size_t> certificate;          // FULL only, indices whose bits span R^4
};

nlohmann::json to_json(const Manifest& m);

struct Corpus {
  std::vector<LabeledSample> samples;
  Manifest manifest;
};

/// Positive count: round(count * pos / (pos + neg)).
std::size_t positive_count(std::size_t count, double pos_ratio, double neg_ratio);

/// Balanced, validated corpus. Every returned sample passes validate();
/// throws Error("GenerationFailed") if a slot cannot be filled.
Corpus gen_corpus(const CorpusConfig& cfg);

/// The 15 non-vulnerable bit patterns: the all-zero anchor and its four
/// single-bit flips first, then the rest.
const std::vector<FactorBits>& full_negative_bits();

}  // namespace factorscan::datagen
