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

#include <memory>
#include <string_view>
#include <vector>

#include "factorscan/minisol/ast.hpp"
#include "factorscan/minisol/cfg.hpp"
#include "factorscan/minisol/defuse.hpp"
#include "factorscan/minisol/parser.hpp"

namespace factorscan {

/// Graph view of one function: flattened statements with their CFG and
/// def-use tables.
struct FunctionGraph {
  const minisol::FunctionDef* fn = nullptr;
  std::vector<const minisol::Stmt*> stmts;
  std::vector<int> depth;  // branch nesting depth per statement
  minisol::Cfg cfg;
  minisol::DefUse du;
};

/// Parsed source plus per-function graphs; the carrier of every factor
/// computation. Shares ownership of the Ast so copies stay valid.
struct ProgramUnit {
  std::shared_ptr<const minisol::ParseResult> parsed;
  std::vector<FunctionGraph> functions;

  const minisol::SourceUnit& source() const { return parsed->unit; }
  const minisol::Ast& ast() const { return parsed->ast; }
  int n_lines() const { return static_cast<int>(parsed->unit.lines.size()); }
};

/// Parses and builds graphs. Throws factorscan::Error on parse errors.
ProgramUnit build_program(std::string_view source);

/// Builds graphs over an already parsed unit (must be error-free).
ProgramUnit build_program(minisol::ParseResult parsed);

}  // namespace factorscan
