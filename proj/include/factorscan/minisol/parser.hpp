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
#include <string_view>
#include <vector>

#include "factorscan/minisol/ast.hpp"

namespace factorscan::minisol {

/// A line-numbered diagnostic. `code` is stable (UnsupportedConstruct,
/// DanglingAnchor, NestedExternalCall, MultiStatementLine, ...).
struct Diagnostic {
  int line = 0;
  std::string code;
  std::string msg;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// `{"line": n, "code": "...", "msg": "..."}`
std::string to_json(const Diagnostic& d);

struct ParseResult {
  SourceUnit unit;
  Ast ast;
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const { return errors.empty(); }
};

/// Parses one MiniSol source. Never throws on bad input; failures are
/// reported in `errors` and leave `ast` partially filled.
ParseResult parse(std::string_view source);

/// Like parse() but throws factorscan::Error carrying the first error code.
ParseResult parse_or_throw(std::string_view source);

}  // namespace factorscan::minisol
