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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factorscan/factors/factor_set.hpp"
#include "factorscan/minisol/ast.hpp"

namespace factorscan::ir {

/// Opcode names as they appear in exported records.
std::optional<minisol::CallKind> parse_opcode(std::string_view name);

struct BytecodeCallEntry {
  std::optional<minisol::CallKind> opcode;  // empty only for unknown opcodes in lenient mode
  std::string opcode_text;
  std::string to_source;
  std::optional<std::string> value;
  std::optional<std::string> likely_src_fn;
  std::optional<std::string> source_hint;
};

enum class BlockTag { Effect, Interaction, Check, Other };
enum class OpType { StateWrite, Call, Read, Guard, Unknown };

const char* to_string(BlockTag t);
const char* to_string(OpType t);

struct IrOp {
  std::string id;
  OpType type = OpType::Unknown;
  std::optional<minisol::CallKind> opcode;
  std::optional<std::string> to_source;
  std::vector<std::string> reads;
  std::vector<std::string> writes;
  std::optional<std::string> source_hint;
};

struct IrBlock {
  int block_id = 0;
  BlockTag tag = BlockTag::Other;
  std::vector<int> block_depends_on;
  std::vector<std::string> statements;
  std::vector<IrOp> operations;

  bool has_call() const;
  bool has_state_write() const;
};

struct IrRecord {
  std::optional<long long> id;
  std::optional<std::string> sol_name;
  std::optional<std::string> sol_path;
  std::vector<BytecodeCallEntry> bytecode_calls;
  std::vector<IrBlock> blocks;
  std::vector<std::string> warnings;
};

struct IngestOptions {
  bool strict = false;  // unknown opcodes and malformed ops become errors
  /// Optional per-opcode weights. An opcode mapped to 0 no longer marks its
  /// unit as an external call. Unset means every whitelisted opcode counts.
  std::map<minisol::CallKind, double> opcode_weight;
};

/// One record. Throws Error("MalformedJson"), Error("UnknownOpcode") (strict),
/// Error("InvalidRecord") for structural violations.
IrRecord parse_ir_record(std::string_view json_text, const IngestOptions& opt = {});

/// A single record, a JSON array of records, or one record per line.
std::vector<IrRecord> parse_ir_stream(std::string_view text, const IngestOptions& opt = {});

/// Units in dependency order: each block comes after all blocks it depends
/// on, ties broken by block id. Throws Error("CyclicDependsOn").
std::vector<int> topological_block_order(const IrRecord& rec);

struct IrFactors {
  FactorSet factors;
  std::vector<int> unit_ids;  // block_id per unit, or call entry index
  bool from_blocks = false;
};

/// Block-level factors. Records with blocks use them and ignore
/// bytecode_calls; records without blocks get one call unit per entry.
IrFactors record_to_factors(const IrRecord& rec, const IngestOptions& opt = {});

}  // namespace factorscan::ir
