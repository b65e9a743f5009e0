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


#include <algorithm>
#include <map>
#include <optional>

#include "draft.hpp"
#include "factorscan/datagen/generators.hpp"
#include "factorscan/error.hpp"

namespace factorscan::datagen {

using detail::choose;
using detail::coin;
using detail::Draft;
using detail::Namer;
using detail::uniform;

namespace {

using Pool = std::vector<std::string>;

const Pool kToken = {"token", "asset", "base", "lpToken", "collateral", "debt"};
const Pool kReceiver = {"to", "recipient", "vaultAddr", "sink"};
const Pool kOperator = {"owner", "spender", "operator", "user"};
const Pool kAmount = {"amount", "value", "shares", "liquidity"};
const Pool kMisc = {"idx", "key", "tag", "nonce", "salt"};
const Pool kBoolArg = {"approved", "granted", "allowedFlag"};
const Pool kLedger = {"credit", "ledger", "deposits", "stakes", "claimed", "rewards",
                      "shareOf", "debtOf", "mainLedger", "paid", "escrowed"};
const Pool kScalar = {"total", "pooled", "reserve", "tally"};
const Pool kAccount = {"account", "member", "payee", "beneficiary", "client"};
const Pool kBonus = {"bonus", "reward", "fee", "points", "extra"};
const Pool kCapUint = {"got", "out", "res", "ret", "received", "minted"};
const Pool kCapBool = {"done", "success", "passed", "accepted"};
const Pool kCapAddr = {"who", "holder", "current"};
const Pool kFiller = {"pad", "stamp", "mark"};
const Pool kMid = {"adj", "portion", "part", "scaled", "net"};
const Pool kBinding = {"c", "inst", "handle", "peer"};
const Pool kFlag = {"instant", "express", "urgent"};
const Pool kFunction = {"run", "execute", "process", "settle", "handle"};

const Pool kTransforms = {" * 2", " / 3", " % 1000", " * 3 / 4", " + 1"};

const std::vector<std::string>& avoid_list() {
  static const std::vector<std::string> v = {"assets", "holdings",   "balances",   "bal",       "owner", "owners",
                                             "allowance", "allowances", "approvals", "ok", "enabled", "token"};
  return v;
}

std::set<std::string> avoid_set() { return {avoid_list().begin(), avoid_list().end()}; }

/// Names picked for the interface call's arguments.
struct CallArgs {
  std::vector<ParamType> types;
  std::vector<std::string> names;
  std::vector<std::string> exprs;
  std::vector<bool> is_param;
  int first_uint = -1;
  int first_address = -1;
};

CallArgs make_args(const InterfaceSpec& spec, Namer& namer) {
  CallArgs a;
  const auto n_addr = std::count(spec.params.begin(), spec.params.end(), ParamType::Address);
  int addr_seen = 0, uint_seen = 0;
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    const ParamType t = spec.params[i];
    std::string name;
    switch (t) {
      case ParamType::Address:
        if (n_addr == 1) {
          Pool both = kReceiver;
          both.insert(both.end(), kOperator.begin(), kOperator.end());
          name = namer.pick(both);
        } else {
          name = namer.pick(addr_seen == 0 ? kOperator : kReceiver);
        }
        if (a.first_address < 0) a.first_address = static_cast<int>(i);
        ++addr_seen;
        break;
      case ParamType::Uint:
        name = namer.pick(uint_seen == 0 ? kAmount : kMisc);
        if (a.first_uint < 0) a.first_uint = static_cast<int>(i);
        ++uint_seen;
        break;
      case ParamType::Bool: name = namer.pick(kBoolArg); break;
      case ParamType::Bytes: name = namer.take("data"); break;
    }
    a.types.push_back(t);
    a.names.push_back(name);
    a.exprs.push_back(name);
    a.is_param.push_back(true);
  }
  return a;
}

std::string param_type(ParamType t) {
  return t == ParamType::Bytes ? std::string("bytes calldata") : std::string(solidity_type(t));
}

void declare_args(Draft& d, const CallArgs& a) {
  for (std::size_t i = 0; i < a.names.size(); ++i)
    if (a.is_param[i]) d.param(param_type(a.types[i]), a.names[i]);
}

std::string call_text(const std::string& target, const InterfaceSpec& spec, const CallArgs& a) {
  std::string s = target + "." + spec.function_name + "(";
  for (std::size_t i = 0; i < a.exprs.size(); ++i) s += (i ? ", " : "") + a.exprs[i];
  return s + ")";
}

/// `<T> name = ` for a captured return value, empty for void.
std::string capture_prefix(ReturnType r, const std::string& name) {
  if (r == ReturnType::Void) return "";
  return std::string(solidity_type(r)) + " " + name + " = ";
}

std::string capture_name(Namer& namer, ReturnType r) {
  switch (r) {
    case ReturnType::Bool: return namer.pick(kCapBool);
    case ReturnType::Uint: return namer.pick(kCapUint);
    case ReturnType::Address: return namer.pick(kCapAddr);
    case ReturnType::Void: break;
  }
  return {};
}

/// Expression that is true when `expr` (of type r) holds a meaningful value.
std::string truthy(ReturnType r, const std::string& expr) {
  switch (r) {
    case ReturnType::Bool: return expr;
    case ReturnType::Uint: return expr + " > 0";
    case ReturnType::Address: return expr + " != address(0)";
    case ReturnType::Void: break;
  }
  return expr;
}

std::string falsy(ReturnType r, const std::string& expr) {
  switch (r) {
    case ReturnType::Bool: return "!" + expr;
    case ReturnType::Uint: return expr + " == 0";
    case ReturnType::Address: return expr + " == address(0)";
    case ReturnType::Void: break;
  }
  return expr;
}

const char* op_text(int op) { return op == 0 ? "=" : op == 1 ? "+=" : "-="; }
const char* op_axis(int op) { return op == 0 ? "assign" : op == 1 ? "add" : "sub"; }

/// A writable state location.
struct StateTarget {
  std::string lhs;
  std::string name;
};

/// arity 0: scalar; 1: mapping(key_type => vt); 2: nested with a uint index.
StateTarget make_state_target(Draft& d, Namer& namer, int arity, const std::string& value_type,
                              const std::string& key_type, const std::string& key, const std::string& idx) {
  StateTarget t;
  if (arity == 0) {
    t.name = namer.pick(kScalar);
    d.state.push_back(value_type + " public " + t.name + ";");
    t.lhs = t.name;
  } else if (arity == 1) {
    t.name = namer.pick(kLedger);
    d.state.push_back("mapping(" + key_type + " => " + value_type + ") public " + t.name + ";");
    t.lhs = t.name + "[" + key + "]";
  } else {
    t.name = namer.pick(kLedger);
    d.state.push_back("mapping(" + key_type + " => mapping(uint256 => " + value_type + ")) public " + t.name + ";");
    t.lhs = t.name + "[" + key + "][" + idx + "]";
  }
  return t;
}

void finish(LabeledSample& s, const Draft& d, std::map<std::string, std::vector<int>>& tags) {
  s.source = d.render(tags);
  auto get = [&](const char* k) { return tags.count(k) ? tags[k] : std::vector<int>{}; };
  s.labels.call_lines = get("call");
  auto ups = get("update");
  auto ups2 = get("update2");
  ups.insert(ups.end(), ups2.begin(), ups2.end());
  std::sort(ups.begin(), ups.end());
  s.labels.update_lines = ups;
  if (tags.count("check")) s.labels.check_line = tags["check"].front();
}

void hit_if(Provenance& p, const std::string& axis, bool away) {
  if (away) p.axes_hit.push_back(axis);
}

// ---------------------------------------------------------------------------
// Task E
// ---------------------------------------------------------------------------

LabeledSample build_external_call(const InterfaceSpec& spec, const ExternalCallAxes& axes, std::uint64_t seed,
                                  bool negative) {
  auto rng = detail::make_rng(seed, "E:" + spec.id());
  Namer namer(rng);
  Draft d;
  d.import_path = spec.import_path;
  d.contract_name = namer.pick({"CallSite", "Relay", "Gateway", "Probe"});
  d.function_name = namer.pick(kFunction);
  if (spec.read_only) d.mutability = "view";

  std::string target;
  std::optional<std::pair<std::string, std::string>> key_param;
  const std::string& I = spec.interface_name;
  switch (axes.instance) {
    case InstanceForm::InterfaceVar: {
      target = namer.pick(kToken);
      d.state.push_back(I + " public " + target + ";");
      break;
    }
    case InstanceForm::MappingElement: {
      const std::string map = namer.pick({"pools", "vaults", "markets", "routes"});
      const std::string key = namer.pick(kAccount);
      d.state.push_back("mapping(address => " + I + ") public " + map + ";");
      key_param = {"address", key};
      target = map + "[" + key + "]";
      break;
    }
    case InstanceForm::StructField: {
      const std::string type = namer.pick({"Slot", "Book", "Position"});
      const std::string field = namer.pick(kToken);
      const std::string var = namer.pick({"slot", "book", "pos"});
      d.state.push_back("struct " + type + " {");
      d.state.push_back("    " + I + " " + field + ";");
      d.state.push_back("}");
      d.state.push_back(type + " public " + var + ";");
      target = var + "." + field;
      break;
    }
    case InstanceForm::Cast: {
      const std::string p = namer.take(spec.cast_param_name());
      key_param = {"address", p};
      target = I + "(" + p + ")";
      break;
    }
  }
  if (key_param) d.param(key_param->first, key_param->second);

  CallArgs args = make_args(spec, namer);
  if (axes.param != ParamForm::Direct) {
    const auto i = static_cast<std::size_t>(args.first_uint);
    const std::string& n = args.names[i];
    switch (axes.param) {
      case ParamForm::Scaled: args.exprs[i] = n + " * " + std::to_string(2 + uniform(rng, 8)); break;
      case ParamForm::Modulo: args.exprs[i] = n + " % " + std::to_string(100 * (1 + uniform(rng, 10))); break;
      case ParamForm::Cast: args.exprs[i] = "uint256(" + n + ")"; break;
      case ParamForm::Direct: break;
    }
  }
  for (std::size_t i = 0; i < args.names.size(); ++i) {
    const bool narrowed = axes.param == ParamForm::Cast && static_cast<int>(i) == args.first_uint;
    d.param(narrowed ? "uint128" : param_type(args.types[i]), args.names[i]);
  }
  const std::string call = call_text(target, spec, args);

  // Recorded only; the flag travels with the sample and shapes no code.
  const bool with_cfg = std::bernoulli_distribution(0.7)(rng);
  const bool guard = coin(rng);
  if (guard) {
    const std::string& first = args.names.front();
    switch (args.types.front()) {
      case ParamType::Address: d.add(0, "require(" + first + " != address(0));"); break;
      case ParamType::Uint: d.add(0, "require(" + first + " > 0);"); break;
      case ParamType::Bool: d.add(0, "require(" + first + ");"); break;
      case ParamType::Bytes: d.add(0, "require(" + first + ".length > 0);"); break;
    }
  }

  std::string stmt;
  if (!negative) {
    switch (axes.context) {
      case ContextForm::Assignment:
        stmt = capture_prefix(spec.return_type, capture_name(namer, spec.return_type)) + call + ";";
        break;
      case ContextForm::Require: stmt = "require(" + truthy(spec.return_type, call) + ");"; break;
      case ContextForm::SingleLineIf: stmt = "if (" + falsy(spec.return_type, call) + ") return;"; break;
      case ContextForm::Statement: stmt = call + ";"; break;
    }
    d.anchored(0, "//e", stmt, "call");
  } else {
    // Same shape, no interaction: a local computation stands in for the call.
    const std::string q = namer.pick({"quota", "limit", "budget"});
    d.param("uint256", q);
    switch (axes.context) {
      case ContextForm::Assignment:
        if (spec.return_type == ReturnType::Bool)
          stmt = "bool " + capture_name(namer, ReturnType::Bool) + " = " + q + " > 0;";
        else if (spec.return_type == ReturnType::Address)
          stmt = "uint256 " + capture_name(namer, ReturnType::Uint) + " = " + q + " + 1;";
        else
          stmt = "uint256 " + capture_name(namer, ReturnType::Uint) + " = " + q + " * 2;";
        break;
      case ContextForm::Require: stmt = "require(" + q + " > 0);"; break;
      case ContextForm::SingleLineIf: stmt = "if (" + q + " == 0) return;"; break;
      case ContextForm::Statement: stmt = "uint256 " + namer.pick(kFiller) + " = " + q + " % 7;"; break;
    }
    d.add(0, stmt);
  }

  LabeledSample s;
  s.task = Task::E;
  s.labels.label = negative ? 0 : 1;
  auto& p = s.provenance;
  p.seed = seed;
  p.template_id = std::string(negative ? "E-neg:" : "E:") + spec.id();
  p.interface_id = spec.id();
  p.with_cfg_context = with_cfg;
  p.axes = {{"instance", to_string(axes.instance)},
            {"context", to_string(axes.context)},
            {"param", to_string(axes.param)},
            {"guard", guard ? "yes" : "no"}};
  hit_if(p, "instance", axes.instance != InstanceForm::InterfaceVar);
  hit_if(p, "context", axes.context != ContextForm::Assignment);
  hit_if(p, "param", axes.param != ParamForm::Direct);
  hit_if(p, "guard", guard);
  p.axes["naming"] = namer.naming();
  std::map<std::string, std::vector<int>> tags;
  finish(s, d, tags);
  return s;
}

// ---------------------------------------------------------------------------
// Task D
// ---------------------------------------------------------------------------

/// Receiver expression, inline cast or a local binding line added to `d`.
std::string d_receiver(Draft& d, Namer& namer, const InterfaceSpec& spec, bool binding) {
  const std::string p = namer.take(spec.cast_param_name());
  d.param("address", p);
  const std::string cast = spec.interface_name + "(" + p + ")";
  if (!binding) return cast;
  const std::string c = namer.pick(kBinding);
  d.add(0, spec.interface_name + " " + c + " = " + cast + ";");
  return c;
}

void add_filler(Draft& d, Namer& namer, std::mt19937_64& rng, int indent) {
  const std::string n = namer.pick(kFiller);
  const std::string src = namer.pick({"salt", "nonce", "tag", "epoch"});
  d.param("uint256", src);
  const Pool forms = {" % 7", " + 1", " * 2"};
  d.add(indent, "uint256 " + n + " = " + src + choose(rng, forms) + ";");
}

}  // namespace

const char* to_string(InstanceForm f) {
  switch (f) {
    case InstanceForm::InterfaceVar: return "interface_var";
    case InstanceForm::MappingElement: return "mapping_element";
    case InstanceForm::StructField: return "struct_field";
    case InstanceForm::Cast: return "cast";
  }
  return "?";
}

const char* to_string(ContextForm f) {
  switch (f) {
    case ContextForm::Assignment: return "assignment";
    case ContextForm::Require: return "require";
    case ContextForm::SingleLineIf: return "single_line_if";
    case ContextForm::Statement: return "statement";
  }
  return "?";
}

const char* to_string(ParamForm f) {
  switch (f) {
    case ParamForm::Direct: return "direct";
    case ParamForm::Scaled: return "scaled";
    case ParamForm::Modulo: return "modulo";
    case ParamForm::Cast: return "cast";
  }
  return "?";
}

const std::vector<std::string>& avoided_identifiers() { return avoid_list(); }

std::string external_call_conflict(const InterfaceSpec& spec, const ExternalCallAxes& axes) {
  if (spec.return_type == ReturnType::Void && axes.context != ContextForm::Statement)
    return "void return cannot be used in a " + std::string(to_string(axes.context)) + " context";
  if (spec.read_only && axes.context == ContextForm::Statement)
    return "a read-only call must use its return value";
  if (axes.param != ParamForm::Direct && !spec.has_uint_param())
    return "parameter form " + std::string(to_string(axes.param)) + " needs a uint256 argument";
  return {};
}

std::vector<ExternalCallAxes> external_call_variants(const InterfaceSpec& spec) {
  std::vector<ExternalCallAxes> out;
  for (auto ctx : {ContextForm::Assignment, ContextForm::Require, ContextForm::SingleLineIf, ContextForm::Statement})
    for (auto inst : {InstanceForm::InterfaceVar, InstanceForm::MappingElement, InstanceForm::StructField,
                      InstanceForm::Cast})
      for (auto prm : {ParamForm::Direct, ParamForm::Scaled, ParamForm::Modulo, ParamForm::Cast}) {
        ExternalCallAxes a{inst, ctx, prm};
        if (external_call_conflict(spec, a).empty()) out.push_back(a);
      }
  return out;
}

LabeledSample gen_external_call(const InterfaceSpec& spec, const ExternalCallAxes& axes, std::uint64_t seed) {
  if (auto why = external_call_conflict(spec, axes); !why.empty())
    throw Error("InvalidCombination", spec.id() + ": " + why);
  return build_external_call(spec, axes, seed, false);
}

LabeledSample gen_external_call(const InterfaceSpec& spec, std::uint64_t variant_seed) {
  const auto variants = external_call_variants(spec);
  return build_external_call(spec, variants[variant_seed % variants.size()], variant_seed, false);
}

LabeledSample gen_external_call_negative(const InterfaceSpec& spec, std::uint64_t variant_seed) {
  const auto variants = external_call_variants(spec);
  return build_external_call(spec, variants[variant_seed % variants.size()], variant_seed, true);
}

std::string dependency_conflict(const DepRule& rule, const InterfaceSpec& spec) {
  switch (rule.dep_id) {
    case DepId::C_CTRL:
      if (rule.direction == Direction::S_TO_E) return "a control dependency runs from the call's result";
      if (spec.return_type != ReturnType::Bool && spec.return_type != ReturnType::Uint)
        return "a control dependency needs a bool or uint256 return";
      return {};
    case DepId::B_INDIRECT:
      if (rule.direction == Direction::S_TO_E && !spec.has_uint_param())
        return "an indirect update-to-call link needs a uint256 argument";
      if (rule.direction == Direction::E_TO_S && !spec.has_uint_param() && spec.return_type != ReturnType::Uint)
        return "an indirect call-to-update link needs a uint256 input or return";
      return {};
    case DepId::A_DIRECT:
    case DepId::Z_NONE: return {};
  }
  return {};
}

LabeledSample gen_dependency(const DepRule& rule, const InterfaceSpec& spec, std::uint64_t seed) {
  if (auto why = dependency_conflict(rule, spec); !why.empty())
    throw Error("IncompatibleRule", std::string(to_string(rule.dep_id)) + "/" + to_string(rule.direction) +
                                        " with " + spec.id() + ": " + why);
  const std::string tid =
      std::string("D:") + to_string(rule.dep_id) + ":" + to_string(rule.direction) + ":" + spec.id();
  auto rng = detail::make_rng(seed, tid);
  Namer namer(rng);
  Draft d;
  d.import_path = spec.import_path;
  d.contract_name = namer.pick({"Ledger", "Router", "Vault", "Keeper"});
  d.function_name = namer.pick(kFunction);

  const bool binding = coin(rng);
  const std::string recv = d_receiver(d, namer, spec, binding);
  CallArgs args = make_args(spec, namer);
  const ReturnType ret = spec.return_type;
  const bool e_first = rule.direction == Direction::E_TO_S;
  const DepId id = rule.dep_id;

  // Decide where the link lives before emitting anything.
  std::string source = "none";  // return | input | key | state
  if (id == DepId::A_DIRECT) {
    std::vector<std::string> opts;
    if (e_first && ret != ReturnType::Void) opts.push_back("return");
    if (args.first_uint >= 0) opts.push_back("input");
    if (args.first_address >= 0) opts.push_back("key");
    source = choose(rng, opts);
  } else if (id == DepId::B_INDIRECT) {
    if (!e_first) {
      source = "state";
    } else {
      std::vector<std::string> opts;
      if (ret == ReturnType::Uint) opts.push_back("return");
      if (args.first_uint >= 0) opts.push_back("input");
      source = choose(rng, opts);
    }
  }

  std::string value_type = "uint256";
  if (source == "return" && id == DepId::A_DIRECT) value_type = solidity_type(ret);
  const bool uint_value = value_type == "uint256";

  int arity = static_cast<int>(uniform(rng, 3));
  if (source == "key") arity = std::max(arity, 1);
  if (!uint_value) arity = std::min(arity, 1);
  const int op = uint_value ? static_cast<int>(uniform(rng, 3)) : 0;

  std::string key_type = "address", key;
  if (source == "key") {
    key = args.names[static_cast<std::size_t>(args.first_address)];
  } else if (arity > 0) {
    key = namer.pick(kAccount);
    d.param("address", key);
  }
  std::string idx;
  if (arity == 2) {
    idx = namer.pick({"slot", "epoch", "round"});
    d.param("uint256", idx);
  }

  const bool needs_cap = ret != ReturnType::Void;
  const std::string cap = needs_cap ? capture_name(namer, ret) : std::string{};
  std::string bonus;
  auto get_bonus = [&]() {
    if (bonus.empty()) {
      bonus = namer.pick(kBonus);
      d.param("uint256", bonus);
    }
    return bonus;
  };

  LabeledSample s;
  s.task = Task::D;
  std::string transform;
  std::string cond;
  bool filler = true;

  if (e_first) {
    std::string rhs;
    std::string mid_line;
    if (id == DepId::A_DIRECT) {
      if (source == "return") rhs = cap;
      else if (source == "input") rhs = args.names[static_cast<std::size_t>(args.first_uint)];
      else rhs = get_bonus();
    } else if (id == DepId::B_INDIRECT) {
      const std::string src = source == "return" ? cap : args.names[static_cast<std::size_t>(args.first_uint)];
      const std::string mid = namer.pick(kMid);
      transform = choose(rng, kTransforms);
      mid_line = "uint256 " + mid + " = " + src + transform + ";";
      rhs = mid;
      filler = coin(rng);
    } else {
      rhs = get_bonus();
      if (id == DepId::C_CTRL) filler = coin(rng);
    }
    declare_args(d, args);
    const StateTarget st = make_state_target(d, namer, arity, value_type, key_type, key, idx);
    d.anchored(0, "//e", capture_prefix(ret, cap) + call_text(recv, spec, args) + ";", "call");
    if (filler) add_filler(d, namer, rng, 0);
    if (!mid_line.empty()) d.add(0, mid_line);
    int indent = 0;
    if (id == DepId::C_CTRL) {
      cond = ret == ReturnType::Bool ? cap : cap + " > " + std::to_string(uniform(rng, 3) * 50);
      d.add(0, "if (" + cond + ") {");
      indent = 1;
    }
    if (op == 2) d.add(indent, "require(" + st.lhs + " >= " + rhs + ");");
    d.anchored(indent, "//s", st.lhs + " " + op_text(op) + " " + rhs + ";", "update");
    if (id == DepId::C_CTRL) d.add(0, "}");
  } else {
    std::string rhs;
    std::string mid;
    if (id == DepId::A_DIRECT && source == "input") {
      rhs = args.names[static_cast<std::size_t>(args.first_uint)];
    } else {
      rhs = get_bonus();
    }
    if (id == DepId::B_INDIRECT) {
      mid = namer.pick(kMid);
      const auto u = static_cast<std::size_t>(args.first_uint);
      args.exprs[u] = mid;
      args.is_param[u] = false;
      filler = coin(rng);
    }
    declare_args(d, args);
    const StateTarget st = make_state_target(d, namer, arity, value_type, key_type, key, idx);
    if (op == 2) d.add(0, "require(" + st.lhs + " >= " + rhs + ");");
    d.anchored(0, "//s", st.lhs + " " + op_text(op) + " " + rhs + ";", "update");
    if (filler) add_filler(d, namer, rng, 0);
    if (!mid.empty()) {
      transform = choose(rng, Pool{" / 2", " * 3 / 4", " / 3", " % 1000"});
      d.add(0, "uint256 " + mid + " = " + st.lhs + transform + ";");
    }
    d.anchored(0, "//e", capture_prefix(ret, needs_cap ? cap : "") + call_text(recv, spec, args) + ";", "call");
  }

  s.labels.label = id == DepId::Z_NONE ? 0 : 1;
  s.labels.dep_id = id;
  s.labels.direction = rule.direction;
  s.labels.dep_kind = id == DepId::A_DIRECT     ? DepKind::Direct
                      : id == DepId::B_INDIRECT ? DepKind::Indirect
                      : id == DepId::C_CTRL     ? DepKind::Ctrl
                                                : DepKind::None;
  auto& p = s.provenance;
  p.seed = seed;
  p.template_id = tid;
  p.interface_id = spec.id();
  p.axes = {{"instance", binding ? "binding" : "inline_cast"},
            {"arity", std::to_string(arity)},
            {"op", op_axis(op)},
            {"source", source},
            {"filler", filler ? "yes" : "no"}};
  if (!transform.empty()) p.axes["transform"] = transform.substr(1);
  if (!cond.empty()) p.axes["cond"] = ret == ReturnType::Bool ? "bool" : "threshold";
  hit_if(p, "instance", binding);
  hit_if(p, "arity", arity != 1);
  hit_if(p, "op", op != 0);
  hit_if(p, "filler", !filler);
  p.axes["naming"] = namer.naming();
  std::map<std::string, std::vector<int>> tags;
  finish(s, d, tags);
  return s;
}

// ---------------------------------------------------------------------------
// Task O
// ---------------------------------------------------------------------------

LabeledSample gen_ordering(const CeiPattern& pattern, const InterfaceSpec& spec, std::uint64_t seed) {
  const CeiType type = pattern.type_id;
  const std::string tid = std::string("O:") + to_string(type) + ":" + spec.id();
  auto rng = detail::make_rng(seed, tid);
  Namer namer(rng, avoid_set());
  Draft d;
  d.import_path = spec.import_path;
  d.contract_name = namer.pick({"Desk", "Treasury", "Pool", "Escrow"});
  d.function_name = namer.pick(kFunction);

  // Interface variable: state (form A) or local cast (form B).
  const bool form_b = coin(rng);
  std::string recv, addr_param;
  if (form_b) {
    addr_param = namer.take("tokenAddr");
    d.param("address", addr_param);
    recv = namer.pick({"t", "tk", "iface"});
  } else {
    Pool pool;
    for (const auto& n : kToken)
      if (!namer.banned(n)) pool.push_back(n);
    recv = namer.pick(pool);
    d.state.push_back(spec.interface_name + " public " + recv + ";");
  }
  CallArgs args = make_args(spec, namer);
  const ReturnType ret = spec.return_type;

  std::vector<std::string> deps;
  if (args.first_uint >= 0) deps = {"DIRECT", "INDIRECT"};
  deps.push_back("KEY");
  const std::string dep = choose(rng, deps);
  const int op = static_cast<int>(uniform(rng, 3));
  const bool midvar = coin(rng);
  const bool msg = coin(rng);

  const auto ui = static_cast<std::size_t>(std::max(args.first_uint, 0));
  std::string key, key_type = "address";
  if (dep == "KEY") {
    const int k = args.first_address >= 0 ? args.first_address : args.first_uint;
    key = args.names[static_cast<std::size_t>(k)];
    key_type = solidity_type(args.types[static_cast<std::size_t>(k)]);
  } else {
    key = namer.pick(kAccount);
  }
  std::string bonus;
  auto get_bonus = [&]() {
    if (bonus.empty()) bonus = namer.pick(kBonus);
    return bonus;
  };

  const bool post = type == CeiType::POST_INTERACTION_EFFECTS;
  const bool s_first = type == CeiType::CEI_OK || post;
  const bool e_first = type != CeiType::CEI_OK;
  const bool capture_ret = e_first && dep != "KEY" && ret == ReturnType::Uint && coin(rng);
  const std::string cap = capture_ret ? namer.pick(kCapUint) : std::string{};

  // Effect right-hand sides: s1 precedes the call, s2 follows it.
  std::string rhs1, rhs2, mid1, mid2, mid1_line, mid2_line;
  const std::string ledger1 = namer.pick(kLedger);
  const std::string ledger2 = post ? namer.pick(kLedger) : std::string{};
  const std::string lhs1 = ledger1 + "[" + key + "]";
  const std::string lhs2 = post ? ledger2 + "[" + key + "]" : lhs1;
  if (s_first) {
    if (dep == "DIRECT") {
      rhs1 = args.names[ui];
    } else if (dep == "INDIRECT") {
      rhs1 = get_bonus();
      mid1 = namer.pick(kMid);
      mid1_line = "uint256 " + mid1 + " = " + lhs1 + choose(rng, Pool{" / 2", " * 3 / 4", " / 3"}) + ";";
      args.exprs[ui] = mid1;
      args.is_param[ui] = false;
    } else {
      rhs1 = get_bonus();
    }
  }
  if (e_first) {
    const std::string src = capture_ret ? cap : args.exprs[ui];
    if (dep == "DIRECT") {
      rhs2 = src;
    } else if (dep == "INDIRECT") {
      mid2 = namer.pick(kMid);
      mid2_line = "uint256 " + mid2 + " = " + src + choose(rng, Pool{" * 2", " * 3 / 4", " + 1"}) + ";";
      rhs2 = mid2;
    } else {
      rhs2 = get_bonus();
    }
  }

  declare_args(d, args);
  if (dep != "KEY") d.param("address", key);
  if (!bonus.empty()) d.param("uint256", bonus);
  d.state.push_back("mapping(" + key_type + " => uint256) public " + ledger1 + ";");
  if (post) d.state.push_back("mapping(" + key_type + " => uint256) public " + ledger2 + ";");

  // CHECK guard: pick among forms whose operands exist before any effect.
  std::vector<std::string> checks;
  std::string first_uint_param;
  for (std::size_t i = 0; i < args.names.size(); ++i)
    if (args.is_param[i] && args.types[i] == ParamType::Uint) {
      first_uint_param = args.names[i];
      break;
    }
  if (first_uint_param.empty() && !bonus.empty()) first_uint_param = bonus;
  if (!first_uint_param.empty()) checks.push_back("positive");
  if (key_type == "address") checks.push_back("nonzero");
  const std::string covered_rhs = s_first ? rhs1 : std::string{};
  if (s_first && op == 2 && (covered_rhs == bonus || (dep == "DIRECT"))) checks.push_back("covered");
  const std::string check = choose(rng, checks);
  std::string cond;
  if (check == "positive") cond = first_uint_param + " > 0";
  else if (check == "nonzero") cond = key + " != address(0)";
  else cond = lhs1 + " >= " + covered_rhs;
  const std::string reason = msg ? ", \"" + choose(rng, Pool{"bad input", "insufficient", "zero"}) + "\"" : "";
  const std::string check_stmt = "require(" + cond + reason + ");";

  // Branch shape for the path-sensitive pattern.
  const bool path = type == CeiType::PATH_SENSITIVE_I_BEFORE_E;
  std::string branch = "none", branch_cond;
  int ind = 0;
  if (path) {
    branch = choose(rng, Pool{"if_else", "if_only", "early_return"});
    if (coin(rng)) {
      branch_cond = namer.pick(kFlag);
      d.param("bool", branch_cond);
    } else {
      const std::string lim = namer.pick({"limit", "floor", "threshold"});
      d.param("uint256", lim);
      branch_cond = key_type == "address" ? ledger1 + "[" + key + "] > " + lim : lim + " > 0";
    }
    if (branch == "early_return") {
      d.add(0, "if (!(" + branch_cond + ")) return;");
    } else {
      d.add(0, "if (" + branch_cond + ") {");
      ind = 1;
    }
  }

  d.anchored(ind, "//CHECK", check_stmt, "check");
  if (form_b)
    d.add(ind, spec.interface_name + " " + recv + " = " + spec.interface_name + "(" + addr_param + ");");
  if (midvar) add_filler(d, namer, rng, ind);
  const std::string call = capture_prefix(capture_ret ? ReturnType::Uint : ReturnType::Void, cap) +
                           call_text(recv, spec, args) + ";";
  if (s_first) {
    d.anchored(ind, "//EFFECT", lhs1 + " " + op_text(op) + " " + rhs1 + ";", "update");
    if (!mid1_line.empty()) d.add(ind, mid1_line);
  }
  d.anchored(ind, "//INTERACTION", call, "call");
  if (e_first) {
    if (!mid2_line.empty()) d.add(ind, mid2_line);
    const int op2 = post ? (op == 2 ? 1 : op) : op;
    d.anchored(ind, "//EFFECT", lhs2 + " " + op_text(op2) + " " + rhs2 + ";", post ? "update2" : "update");
  }
  if (path && branch == "if_else") {
    d.add(0, "} else {");
    add_filler(d, namer, rng, 1);
    d.add(0, "}");
  } else if (path && branch == "if_only") {
    d.add(0, "}");
  }

  const std::string naming = namer.naming();
  const std::string fp = std::string(form_b ? "B" : "A") + "|" + check + "|" + op_axis(op) + "|" + dep + "|" +
                         std::to_string(detail::fnv1a(naming) % 10000) + "|" + (midvar ? "pad" : "none") + "|" +
                         (msg ? "msg" : "nomsg");
  d.state.push_back("string constant FP = \"" + fp + "\";");

  LabeledSample s;
  s.task = Task::O;
  s.labels.cei_type = type;
  s.labels.vulnerable = !pattern.good;
  s.labels.label = pattern.good ? 0 : 1;
  auto& p = s.provenance;
  p.seed = seed;
  p.template_id = tid;
  p.interface_id = spec.id();
  p.axes = {{"iface_mode", form_b ? "B" : "A"}, {"check", check},   {"effect", op_axis(op)},
            {"dep", dep},                        {"midvar", midvar ? "pad" : "none"},
            {"msg", msg ? "msg" : "nomsg"},      {"capture", capture_ret ? "yes" : "no"}};
  if (path) {
    p.axes["branch"] = branch;
    p.axes["branch_cond"] = branch_cond.find(' ') == std::string::npos ? "flag" : "threshold";
  }
  hit_if(p, "iface_mode", form_b);
  hit_if(p, "check", check != "positive");
  hit_if(p, "effect", op != 0);
  hit_if(p, "dep", dep != "DIRECT");
  hit_if(p, "midvar", midvar);
  hit_if(p, "msg", msg);
  p.axes["naming"] = naming;
  std::map<std::string, std::vector<int>> tags;
  finish(s, d, tags);
  return s;
}

// ---------------------------------------------------------------------------
// FULL: one knob per factor
// ---------------------------------------------------------------------------

LabeledSample gen_full(const FactorBits& bits, const InterfaceSpec& spec, std::uint64_t seed) {
  if (!spec.has_uint_param()) throw Error("IncompatibleRule", spec.id() + ": the full template needs a uint256 argument");
  for (int b : bits)
    if (b != 0 && b != 1) throw Error("InvalidLabel", "factor bits must be 0 or 1");
  const int e = bits[0], s_bit = bits[1], dep = bits[2], ord = bits[3];
  std::string bit_str;
  for (int b : bits) bit_str += std::to_string(b);
  const std::string tid = "FULL:" + bit_str + ":" + spec.id();
  auto rng = detail::make_rng(seed, tid);
  Namer namer(rng);
  Draft d;
  d.import_path = spec.import_path;
  d.contract_name = namer.pick({"Vault", "Desk", "Pool", "Keeper", "Router"});
  d.function_name = namer.pick(kFunction);

  const bool cast = coin(rng);
  std::string recv;
  if (cast) {
    const std::string p = namer.take(spec.cast_param_name());
    d.param("address", p);
    recv = spec.interface_name + "(" + p + ")";
  } else {
    recv = namer.pick(kToken);
    d.state.push_back(spec.interface_name + " public " + recv + ";");
  }
  CallArgs args = make_args(spec, namer);
  const std::string shared = args.names[static_cast<std::size_t>(args.first_uint)];
  declare_args(d, args);
  const std::string key = namer.pick(kAccount);
  d.param("address", key);
  std::string bonus;
  if (!dep) {
    bonus = namer.pick(kBonus);
    d.param("uint256", bonus);
  }
  const std::string ledger = namer.pick(kLedger);
  d.state.push_back("mapping(address => uint256) public " + ledger + ";");
  const int op = static_cast<int>(uniform(rng, 3));
  const bool guard = coin(rng);
  const bool filler = coin(rng);
  const bool capture = spec.return_type == ReturnType::Uint && coin(rng);
  const std::string cap = namer.pick(kCapUint);

  std::string rhs = dep ? shared : bonus;
  if (dep && ord && capture) rhs = cap;
  const std::string lhs = ledger + "[" + key + "]";

  auto call_site = [&]() {
    if (e) {
      const std::string pre = capture ? "uint256 " + cap + " = " : "";
      d.anchored(0, "//e", pre + call_text(recv, spec, args) + ";", "call");
    } else {
      d.add(0, "uint256 " + cap + " = " + shared + " * 3;");
    }
  };
  auto write_site = [&]() {
    if (s_bit) {
      if (op == 2) d.add(0, "require(" + lhs + " >= " + rhs + ");");
      d.anchored(0, "//s", lhs + " " + op_text(op) + " " + rhs + ";", "update");
    } else {
      d.add(0, "uint256 " + namer.pick({"tallyLocal", "noted", "planned"}) + " = " + rhs + ";");
    }
  };
  if (guard) d.add(0, "require(" + shared + " > 0);");
  if (ord) {
    call_site();
    if (filler) add_filler(d, namer, rng, 0);
    write_site();
  } else {
    write_site();
    if (filler) add_filler(d, namer, rng, 0);
    call_site();
  }

  LabeledSample s;
  s.task = Task::Full;
  s.labels.factor_bits = bits;
  const bool v = e && s_bit && dep && ord;
  s.labels.vulnerable = v;
  s.labels.label = v ? 1 : 0;
  auto& p = s.provenance;
  p.seed = seed;
  p.template_id = tid;
  p.interface_id = spec.id();
  p.axes = {{"bits", bit_str},
            {"instance", cast ? "cast" : "interface_var"},
            {"op", op_axis(op)},
            {"guard", guard ? "yes" : "no"},
            {"filler", filler ? "yes" : "no"},
            {"capture", capture ? "yes" : "no"}};
  hit_if(p, "instance", cast);
  hit_if(p, "op", op != 0);
  hit_if(p, "guard", guard);
  hit_if(p, "filler", filler);
  p.axes["naming"] = namer.naming();
  std::map<std::string, std::vector<int>> tags;
  finish(s, d, tags);
  return s;
}

}  // namespace factorscan::datagen
