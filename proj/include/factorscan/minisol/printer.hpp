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

#include "factorscan/minisol/ast.hpp"

namespace factorscan::minisol {

/// Canonical single-line spelling with minimal parentheses.
std::string print_expr(const Expr& e);
inline std::string print_expr(const ExprRef& e) { return e ? print_expr(*e) : std::string(); }

/// The statement's head line: the full statement for simple kinds,
/// `if (cond) {` for branches.
std::string print_stmt_head(const Stmt& s);

/// Pretty-prints a whole unit: preamble, contract, anchors. Re-parsing the
/// output yields a structurally identical Ast once line numbers settle.
std::string print(const Ast& ast);

}  // namespace factorscan::minisol
