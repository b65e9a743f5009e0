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

#include "factorscan/minisol/semantic.hpp"

#include <cctype>

namespace factorscan::minisol {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return true;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Recursive-descent reader over the canonical type spelling.
struct TypeReader {
  std::string_view s;
  std::size_t i = 0;

  void ws() {
    while (i < s.size() && s[i] == ' ') ++i;
  }
  std::string word() {
    ws();
    std::size_t j = i;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                            s[j] == '$' || s[j] == '.'))
      ++j;
    std::string w(s.substr(i, j - i));
    i = j;
    return w;
  }
  bool eat(std::string_view lit) {
    ws();
    if (s.substr(i, lit.size()) == lit) {
      i += lit.size();
      return true;
    }
    return false;
  }

  std::optional<TypeName> read() {
    std::optional<TypeName> base;
    std::size_t save = i;
    std::string w = word();
    if (w.empty()) return std::nullopt;
    if (w == "mapping") {
      if (!eat("(")) return std::nullopt;
      auto k = read();
      if (!k || !eat("=>")) return std::nullopt;
      auto v = read();
      if (!v || !eat(")")) return std::nullopt;
      TypeName t;
      t.kind = TypeName::Kind::Mapping;
      t.name = "mapping";
      t.key = std::make_shared<const TypeName>(*k);
      t.value = std::make_shared<const TypeName>(*v);
      base = t;
    } else {
      (void)save;
      TypeName t;
      if (is_elementary_type_name(w)) {
        t.kind = TypeName::Kind::Elementary;
        if (w == "address") {
          std::size_t keep = i;
          if (word() == "payable") w = "address payable";
          else i = keep;
        }
      } else {
        t.kind = TypeName::Kind::User;
      }
      t.name = w;
      base = t;
    }
    // array suffixes
    for (;;) {
      std::size_t keep = i;
      if (!eat("[")) break;
      ws();
      std::size_t j = s.find(']', i);
      if (j == std::string_view::npos || !all_digits(trim(s.substr(i, j - i)))) {
        i = keep;
        break;
      }
      i = j + 1;
      TypeName arr;
      arr.kind = TypeName::Kind::Array;
      arr.name = "array";
      arr.value = std::make_shared<const TypeName>(*base);
      base = arr;
    }
    // data location and trailing words are ignored
    return base;
  }
};

bool is_contract_like(const TypeName& t, const Scope& scope) {
  return t.kind == TypeName::Kind::User && !scope.is_struct(t.name);
}

TypeName elementary(std::string name) {
  TypeName t;
  t.kind = TypeName::Kind::Elementary;
  t.name = std::move(name);
  return t;
}

}  // namespace

bool is_elementary_type_name(std::string_view w) {
  if (w == "address" || w == "bool" || w == "string" || w == "bytes" || w == "byte" ||
      w == "payable")
    return true;
  auto numeric_suffix = [](std::string_view rest) { return all_digits(rest); };
  if (w.rfind("uint", 0) == 0) return numeric_suffix(w.substr(4));
  if (w.rfind("int", 0) == 0) return numeric_suffix(w.substr(3));
  if (w.rfind("bytes", 0) == 0) return w.size() > 5 && numeric_suffix(w.substr(5));
  return false;
}

bool is_builtin_global(std::string_view w) {
  return w == "msg" || w == "block" || w == "tx" || w == "abi" || w == "keccak256" ||
         w == "sha256" || w == "ecrecover" || w == "require" || w == "assert" || w == "type" ||
         w == "gasleft" || w == "blockhash" || w == "addmod" || w == "mulmod";
}

std::optional<TypeName> parse_type(std::string_view text) {
  TypeReader r{text};
  return r.read();
}

Scope::Scope(const Ast& ast) : ast_(&ast) {
  for (const auto& v : ast.state_vars) state_[v.name] = v.type;
  for (const auto& s : ast.structs) structs_[s.name] = &s;
  for (const auto& f : ast.functions) functions_.insert(f.name);
  for (const auto& t : ast.external_types) external_types_.insert(t);
}

void Scope::enter_function(const FunctionDef& fn) {
  locals_.clear();
  local_kind_.clear();
  for (const auto& p : fn.params) {
    if (p.name.empty()) continue;
    locals_[p.name] = p.type;
    local_kind_[p.name] = SymbolKind::Param;
  }
  for (const auto& p : fn.returns) {
    if (p.name.empty()) continue;
    locals_[p.name] = p.type;
    local_kind_[p.name] = SymbolKind::Local;
  }
}

void Scope::declare_local(const std::string& name, const std::string& type) {
  if (name.empty()) return;
  locals_[name] = type;
  local_kind_[name] = SymbolKind::Local;
}

SymbolKind Scope::kind_of(const std::string& name) const {
  if (auto it = local_kind_.find(name); it != local_kind_.end()) return it->second;
  if (state_.count(name)) return SymbolKind::State;
  return SymbolKind::None;
}

bool Scope::is_type_name(const std::string& name) const {
  if (kind_of(name) != SymbolKind::None) return false;
  if (structs_.count(name) || external_types_.count(name)) return true;
  if (is_elementary_type_name(name)) return true;
  // Unknown capitalised identifiers are taken to be imported types.
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0])) &&
         !functions_.count(name);
}

std::optional<TypeName> Scope::type_of(const Expr& e) const {
  switch (e.kind) {
    case ExprKind::Ident: {
      if (auto it = locals_.find(e.text); it != locals_.end()) return parse_type(it->second);
      if (auto it = state_.find(e.text); it != state_.end()) return parse_type(it->second);
      if (e.text == "this") {
        TypeName t;
        t.kind = TypeName::Kind::User;
        t.name = ast_->contract_name.empty() ? "this" : ast_->contract_name;
        return t;
      }
      return std::nullopt;
    }
    case ExprKind::Number: return elementary("uint256");
    case ExprKind::String: return elementary("string");
    case ExprKind::Bool: return elementary("bool");
    case ExprKind::Index: {
      auto base = type_of(*e.children[0]);
      if (!base) return std::nullopt;
      if ((base->kind == TypeName::Kind::Mapping || base->kind == TypeName::Kind::Array) &&
          base->value)
        return *base->value;
      return std::nullopt;
    }
    case ExprKind::Member: {
      const Expr& b = *e.children[0];
      if (b.kind == ExprKind::Ident && b.text == "msg") {
        if (e.text == "sender") return elementary("address");
        if (e.text == "value") return elementary("uint256");
        return std::nullopt;
      }
      if (b.kind == ExprKind::Ident && b.text == "tx" && e.text == "origin")
        return elementary("address");
      if (b.kind == ExprKind::Ident && b.text == "block") return elementary("uint256");
      auto base = type_of(b);
      if (!base) return std::nullopt;
      if (base->kind == TypeName::Kind::User) {
        if (auto it = structs_.find(base->name); it != structs_.end()) {
          for (const auto& f : it->second->fields)
            if (f.name == e.text) return parse_type(f.type);
        }
        return std::nullopt;
      }
      if (e.text == "length" || (base->is_address() && e.text == "balance"))
        return elementary("uint256");
      return std::nullopt;
    }
    case ExprKind::Call: {
      const Expr& callee = *e.children[0];
      if (callee.kind == ExprKind::Ident && is_type_name(callee.text)) {
        if (callee.text == "payable") return elementary("address payable");
        return parse_type(callee.text);
      }
      if (callee.kind == ExprKind::Ident) {
        for (const auto& f : ast_->functions)
          if (f.name == callee.text && f.returns.size() == 1) return parse_type(f.returns[0].type);
      }
      return std::nullopt;
    }
    case ExprKind::Unary:
      if (e.text == "!") return elementary("bool");
      return type_of(*e.children[0]);
    case ExprKind::Binary: {
      const std::string& op = e.text;
      if (op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=" ||
          op == "&&" || op == "||")
        return elementary("bool");
      return type_of(*e.children[0]);
    }
  }
  return std::nullopt;
}

std::optional<CallSite> Scope::classify_call(const ExprRef& call) const {
  const Expr& c = *call;
  if (c.kind != ExprKind::Call) return std::nullopt;
  const Expr& callee = *c.children[0];
  if (callee.kind != ExprKind::Member) return std::nullopt;
  const ExprRef& recv = callee.children[0];
  const std::string& method = callee.text;
  CallSite site;
  site.call = call;
  site.receiver = recv;
  site.method = method;

  if (recv->kind == ExprKind::Ident) {
    const std::string& name = recv->text;
    if (name == "this") {
      site.kind = CallKind::HighLevel;
      return site;
    }
    if (is_builtin_global(name)) return std::nullopt;
    if (kind_of(name) == SymbolKind::None && is_type_name(name)) return std::nullopt;  // library
  }
  auto t = type_of(*recv);
  if (t && t->is_address()) {
    if (method == "call") site.kind = CallKind::LowLevel;
    else if (method == "delegatecall") site.kind = CallKind::DelegateCall;
    else if (method == "staticcall") site.kind = CallKind::StaticCall;
    else if (method == "transfer" || method == "send") site.kind = CallKind::Call;
    else return std::nullopt;
    return site;
  }
  if (t && is_contract_like(*t, *this)) {
    site.kind = CallKind::HighLevel;
    return site;
  }
  if (t) return std::nullopt;  // array push, struct member, elementary helpers
  // Untyped receiver: a bare unknown identifier is assumed to be inherited
  // contract-typed storage; anything else is not a call we recognise.
  if (recv->kind == ExprKind::Ident && kind_of(recv->text) == SymbolKind::None) {
    site.kind = CallKind::HighLevel;
    return site;
  }
  return std::nullopt;
}

namespace {

void collect_calls(const Scope& scope, const ExprRef& e, std::vector<CallSite>& out) {
  if (!e) return;
  for (const auto& k : e->children) collect_calls(scope, k, out);
  for (const auto& o : e->options) collect_calls(scope, o.value, out);
  if (e->kind == ExprKind::Call) {
    if (auto site = scope.classify_call(e)) out.push_back(*site);
  }
}

}  // namespace

std::vector<CallSite> external_calls(const Scope& scope, const ExprRef& e) {
  std::vector<CallSite> out;
  collect_calls(scope, e, out);
  return out;
}

}  // namespace factorscan::minisol
