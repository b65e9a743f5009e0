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

#include <vector>

#include "factorscan/minisol/ast.hpp"

namespace factorscan::minisol {

/// Pre-order flattening of a function body. Statement indices used by the
/// CFG and def-use tables refer to positions in this list.
std::vector<const Stmt*> flatten(const FunctionDef& fn);

enum class EdgeKind { Fallthrough, Then, Else, Return };

const char* to_string(EdgeKind kind);

struct CfgEdge {
  int from = 0;
  int to = 0;
  EdgeKind kind = EdgeKind::Fallthrough;
  friend bool operator==(const CfgEdge&, const CfgEdge&) = default;
};

/// Basic-block graph of one function. The entry and exit nodes are virtual
/// and carry the ids kEntry and kExit.
struct Cfg {
  static constexpr int kEntry = -1;
  static constexpr int kExit = -2;

  std::vector<std::vector<int>> blocks;  // statement indices, in order
  std::vector<CfgEdge> edges;
  int entry = kEntry;
  int exit = kExit;

  std::vector<int> block_of;                 // statement index -> block id
  std::vector<std::vector<int>> stmt_succ;   // statement index -> successors (kExit allowed)
  std::vector<std::vector<EdgeKind>> stmt_succ_kind;
  std::vector<bool> reachable;               // per statement, from entry

  std::vector<int> successors(int block) const;
  /// Number of distinct entry-to-exit paths (acyclic by construction).
  long long count_paths() const;
};

Cfg build_cfg(const FunctionDef& fn);

}  // namespace factorscan::minisol
