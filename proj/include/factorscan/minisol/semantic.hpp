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
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "factorscan/minisol/ast.hpp"

namespace factorscan::minisol {

/// Structured view of a canonical type string such as
/// "mapping(address => uint256)" or "IERC20[]".
struct TypeName {
  enum class Kind { Elementary, Mapping, Array, User };
  Kind kind = Kind::Elementary;
  std::string name;                        // elementary or user-defined name
  std::shared_ptr<const TypeName> key;     // mapping key
  std::shared_ptr<const TypeName> value;   // mapping value or array element

  bool is_address() const { return kind == Kind::Elementary && name.rfind("address", 0) == 0; }
};

/// Parses a canonical type string. Data location suffixes are dropped.
std::optional<TypeName> parse_type(std::string_view text);

bool is_elementary_type_name(std::string_view word);

/// Names that are never variables: msg, block, tx, abi, ...
bool is_builtin_global(std::string_view word);

enum class SymbolKind { None, State, Param, Local };

/// Flat, declaration-ordered symbol table for one function. Locals are
/// visible from their declaration onward; shadowing of state variables by
/// parameters and locals is honored.
class Scope {
 public:
  explicit Scope(const Ast& ast);

  void enter_function(const FunctionDef& fn);
  void declare_local(const std::string& name, const std::string& type);

  SymbolKind kind_of(const std::string& name) const;
  bool is_type_name(const std::string& name) const;
  bool is_struct(const std::string& name) const { return structs_.count(name) > 0; }

  /// Static type of an expression, when it can be determined.
  std::optional<TypeName> type_of(const Expr& e) const;

  /// Returns the call site if `call` is an external call (see CallKind).
  std::optional<CallSite> classify_call(const ExprRef& call) const;

 private:
  const Ast* ast_;
  std::map<std::string, std::string> state_;
  std::map<std::string, const StructDef*> structs_;
  std::set<std::string> functions_;
  std::set<std::string> external_types_;
  std::map<std::string, std::string> locals_;  // params, named returns, locals
  std::map<std::string, SymbolKind> local_kind_;
};

/// All external calls in `e`, in evaluation order (receivers before the
/// calls that use them).
std::vector<CallSite> external_calls(const Scope& scope, const ExprRef& e);

}  // namespace factorscan::minisol
