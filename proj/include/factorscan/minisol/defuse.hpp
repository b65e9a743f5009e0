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

#include <set>
#include <string>
#include <vector>

#include "factorscan/minisol/ast.hpp"

namespace factorscan::minisol {

/// A normalized access path: the canonical printed form of an identifier
/// with its member and index segments, e.g. "m[from][i]". Two paths alias
/// iff their strings are equal.
using VarPath = std::string;

struct StmtDefUse {
  std::set<VarPath> reads;         // values read (index sub-expressions excluded)
  std::set<VarPath> keys;          // paths read inside index expressions
  std::set<VarPath> writes;
  std::set<VarPath> state_writes;  // writes rooted at a contract state variable
  std::set<VarPath> call_inputs;   // reads and keys of the external call, if any

  /// Everything the statement's computation depends on.
  std::set<VarPath> inputs() const;
  friend bool operator==(const StmtDefUse&, const StmtDefUse&) = default;
};

/// Per-statement tables for one function, indexed like flatten(fn).
struct DefUse {
  std::vector<StmtDefUse> stmts;
};

DefUse build_defuse(const Ast& ast, const FunctionDef& fn);

/// Root identifier of an access path ("m" for "m[a].b").
std::string path_root(const VarPath& p);

}  // namespace factorscan::minisol
