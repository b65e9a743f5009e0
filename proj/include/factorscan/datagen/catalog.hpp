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

namespace factorscan::datagen {

enum class ParamType { Address, Uint, Bool, Bytes };
enum class ReturnType { Void, Bool, Uint, Address };

const char* solidity_type(ParamType t);
const char* solidity_type(ReturnType t);

/// One callable interface function and where its type comes from.
struct InterfaceSpec {
  std::string standard_name;   // "ERC20"
  std::string interface_name;  // "IERC20"
  std::string function_name;   // "transfer"
  std::vector<ParamType> params;
  ReturnType return_type = ReturnType::Void;
  std::string import_path;
  bool read_only = false;

  /// "transfer(address,uint256)"
  std::string signature() const;
  std::string id() const { return interface_name + "." + signature(); }
  bool has_uint_param() const;
  /// Parameter name used when the instance is cast from an address argument.
  std::string cast_param_name() const;
};

/// Interfaces enumerated from the common token standards.
const std::vector<InterfaceSpec>& catalog();

/// Throws Error("UnknownInterface") when no entry matches `id()` or `signature()`.
const InterfaceSpec& find_spec(const std::string& key);

}  // namespace factorscan::datagen
