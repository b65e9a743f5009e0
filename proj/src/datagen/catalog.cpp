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


#include "factorscan/datagen/catalog.hpp"

#include <algorithm>

#include "factorscan/error.hpp"

namespace factorscan::datagen {

const char* solidity_type(ParamType t) {
  switch (t) {
    case ParamType::Address: return "address";
    case ParamType::Uint: return "uint256";
    case ParamType::Bool: return "bool";
    case ParamType::Bytes: return "bytes";
  }
  return "uint256";
}

const char* solidity_type(ReturnType t) {
  switch (t) {
    case ReturnType::Void: return "";
    case ReturnType::Bool: return "bool";
    case ReturnType::Uint: return "uint256";
    case ReturnType::Address: return "address";
  }
  return "";
}

std::string InterfaceSpec::signature() const {
  std::string s = function_name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ",";
    s += solidity_type(params[i]);
  }
  return s + ")";
}

bool InterfaceSpec::has_uint_param() const {
  return std::find(params.begin(), params.end(), ParamType::Uint) != params.end();
}

std::string InterfaceSpec::cast_param_name() const {
  if (interface_name == "IERC20") return "token";
  if (interface_name == "IERC721") return "nft";
  if (interface_name == "IERC1155") return "token1155";
  if (interface_name == "IERC1363") return "token1363";
  if (interface_name == "IERC3156FlashLender") return "lender";
  return "target";
}

namespace {

using P = ParamType;
using R = ReturnType;

InterfaceSpec make(const char* std_name, const char* iface, const char* fn, std::vector<P> params, R ret,
                   const char* path, bool ro) {
  return InterfaceSpec{std_name, iface, fn, std::move(params), ret, path, ro};
}

}  // namespace

const std::vector<InterfaceSpec>& catalog() {
  static const std::vector<InterfaceSpec> specs = [] {
    const char* erc20 = "@openzeppelin/contracts/token/ERC20/IERC20.sol";
    const char* erc721 = "@openzeppelin/contracts/token/ERC721/IERC721.sol";
    const char* erc1155 = "@openzeppelin/contracts/token/ERC1155/IERC1155.sol";
    const char* erc777 = "@openzeppelin/contracts/token/ERC777/IERC777.sol";
    const char* erc4626 = "@openzeppelin/contracts/interfaces/IERC4626.sol";
    const char* erc1363 = "@openzeppelin/contracts/interfaces/IERC1363.sol";
    const char* erc3156 = "@openzeppelin/contracts/interfaces/IERC3156FlashLender.sol";
    return std::vector<InterfaceSpec>{
        make("ERC20", "IERC20", "transfer", {P::Address, P::Uint}, R::Bool, erc20, false),
        make("ERC20", "IERC20", "transferFrom", {P::Address, P::Address, P::Uint}, R::Bool, erc20, false),
        make("ERC20", "IERC20", "approve", {P::Address, P::Uint}, R::Bool, erc20, false),
        make("ERC20", "IERC20", "balanceOf", {P::Address}, R::Uint, erc20, true),
        make("ERC20", "IERC20", "allowance", {P::Address, P::Address}, R::Uint, erc20, true),
        make("ERC721", "IERC721", "safeTransferFrom", {P::Address, P::Address, P::Uint}, R::Void, erc721, false),
        make("ERC721", "IERC721", "transferFrom", {P::Address, P::Address, P::Uint}, R::Void, erc721, false),
        make("ERC721", "IERC721", "approve", {P::Address, P::Uint}, R::Void, erc721, false),
        make("ERC721", "IERC721", "ownerOf", {P::Uint}, R::Address, erc721, true),
        make("ERC721", "IERC721", "balanceOf", {P::Address}, R::Uint, erc721, true),
        make("ERC1155", "IERC1155", "safeTransferFrom", {P::Address, P::Address, P::Uint, P::Uint, P::Bytes},
             R::Void, erc1155, false),
        make("ERC1155", "IERC1155", "setApprovalForAll", {P::Address, P::Bool}, R::Void, erc1155, false),
        make("ERC1155", "IERC1155", "balanceOf", {P::Address, P::Uint}, R::Uint, erc1155, true),
        make("ERC1155", "IERC1155", "isApprovedForAll", {P::Address, P::Address}, R::Bool, erc1155, true),
        make("ERC777", "IERC777", "send", {P::Address, P::Uint, P::Bytes}, R::Void, erc777, false),
        make("ERC777", "IERC777", "burn", {P::Uint, P::Bytes}, R::Void, erc777, false),
        make("ERC4626", "IERC4626", "deposit", {P::Uint, P::Address}, R::Uint, erc4626, false),
        make("ERC4626", "IERC4626", "withdraw", {P::Uint, P::Address, P::Address}, R::Uint, erc4626, false),
        make("ERC4626", "IERC4626", "redeem", {P::Uint, P::Address, P::Address}, R::Uint, erc4626, false),
        make("ERC4626", "IERC4626", "convertToShares", {P::Uint}, R::Uint, erc4626, true),
        make("ERC1363", "IERC1363", "transferAndCall", {P::Address, P::Uint}, R::Bool, erc1363, false),
        make("ERC3156", "IERC3156FlashLender", "maxFlashLoan", {P::Address}, R::Uint, erc3156, true),
        make("ERC3156", "IERC3156FlashLender", "flashFee", {P::Address, P::Uint}, R::Uint, erc3156, true),
    };
  }();
  return specs;
}

const InterfaceSpec& find_spec(const std::string& key) {
  for (const auto& s : catalog())
    if (s.id() == key || s.signature() == key) return s;
  throw Error("UnknownInterface", "no catalog entry for '" + key + "'");
}

}  // namespace factorscan::datagen
