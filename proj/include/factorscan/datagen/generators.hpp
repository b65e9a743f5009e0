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
#include <string>
#include <vector>

#include "factorscan/datagen/catalog.hpp"
#include "factorscan/datagen/sample.hpp"
#include "factorscan/minisol/parser.hpp"

namespace factorscan::datagen {

enum class InstanceForm { InterfaceVar, MappingElement, StructField, Cast };
enum class ContextForm { Assignment, Require, SingleLineIf, Statement };
enum class ParamForm { Direct, Scaled, Modulo, Cast };

const char* to_string(InstanceForm f);
const char* to_string(ContextForm f);
const char* to_string(ParamForm f);

struct ExternalCallAxes {
  InstanceForm instance = InstanceForm::InterfaceVar;
  ContextForm context = ContextForm::Assignment;
  ParamForm param = ParamForm::Direct;
};

/// Why a combination cannot be realised, or empty when it can.
std::string external_call_conflict(const InterfaceSpec& spec, const ExternalCallAxes& axes);

/// Every realisable combination, context-major, baseline first.
std::vector<ExternalCallAxes> external_call_variants(const InterfaceSpec& spec);

/// Picks combination `variant_seed mod count`; identifiers also follow the seed.
LabeledSample gen_external_call(const InterfaceSpec& spec, std::uint64_t variant_seed);
/// Explicit combination. Throws Error("InvalidCombination").
LabeledSample gen_external_call(const InterfaceSpec& spec, const ExternalCallAxes& axes, std::uint64_t seed);
/// Same skeleton with the call replaced by local arithmetic (label 0).
LabeledSample gen_external_call_negative(const InterfaceSpec& spec, std::uint64_t variant_seed);

/// Empty when the rule can be realised with this interface.
std::string dependency_conflict(const DepRule& rule, const InterfaceSpec& spec);
/// Throws Error("IncompatibleRule").
LabeledSample gen_dependency(const DepRule& rule, const InterfaceSpec& spec, std::uint64_t seed);

LabeledSample gen_ordering(const CeiPattern& pattern, const InterfaceSpec& spec, std::uint64_t seed);

/// Factor-toggled program: each bit switches one disjoint part of the body.
/// Needs an interface with a uint256 parameter (Error("IncompatibleRule")).
LabeledSample gen_full(const FactorBits& bits, const InterfaceSpec& spec, std::uint64_t seed);

/// Identifiers the ordering generator must not use.
const std::vector<std::string>& avoided_identifiers();

struct ValidationResult {
  std::vector<minisol::Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Structural checks followed by re-analysis of the labels.
ValidationResult validate(const LabeledSample& sample);

}  // namespace factorscan::datagen
