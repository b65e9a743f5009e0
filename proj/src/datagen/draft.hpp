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


// Internal pieces shared by the generators and the validator.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "factorscan/datagen/catalog.hpp"

namespace factorscan::datagen::detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

/// Deterministic engine for one (seed, template) pair.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view salt) {
  const std::uint64_t h = fnv1a(salt);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(std::mt19937_64& rng) { return uniform(rng, 2) == 1; }

template <class T>
const T& choose(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[uniform(rng, v.size())];
}

/// Hands out distinct identifiers from fixed pools.
class Namer {
 public:
  Namer(std::mt19937_64& rng, std::set<std::string> banned = {}) : rng_(rng), used_(std::move(banned)) {
    banned_ = used_;
  }

  std::string pick(const std::vector<std::string>& pool) {
    std::vector<std::string> free;
    for (const auto& p : pool)
      if (!used_.count(p)) free.push_back(p);
    std::string name;
    if (free.empty()) {
      name = pool.front();
      for (int k = 2; used_.count(name); ++k) name = pool.front() + std::to_string(k);
    } else {
      name = choose(rng_, free);
    }
    used_.insert(name);
    picks_.push_back(name);
    return name;
  }

  /// Takes a fixed name; fails over to a suffix when it is taken.
  std::string take(const std::string& want) { return pick({want}); }

  bool banned(const std::string& s) const { return banned_.count(s) > 0; }
  const std::vector<std::string>& picks() const { return picks_; }

  std::string naming() const {
    std::string s;
    for (const auto& p : picks_) s += (s.empty() ? "" : ",") + p;
    return s;
  }

 private:
  std::mt19937_64& rng_;
  std::set<std::string> used_;
  std::set<std::string> banned_;
  std::vector<std::string> picks_;
};

/// A contract with one external function, assembled line by line. Body
/// lines can carry a tag so their final line numbers can be queried.
class Draft {
 public:
  std::string import_path;
  std::string contract_name;
  std::string function_name = "run";
  std::string mutability;  // "" or "view"
  std::vector<std::string> state;  // members, already indented relative to the contract

  struct Line {
    int indent = 0;
    std::string text;
    std::string tag;
  };
  std::vector<Line> body;

  void param(const std::string& type, const std::string& name) { params_.push_back(type + " " + name); }

  void add(int indent, std::string text, std::string tag = {}) {
    body.push_back({indent, std::move(text), std::move(tag)});
  }

  void anchored(int indent, const char* anchor, std::string stmt, std::string tag) {
    add(indent, anchor);
    add(indent, std::move(stmt), std::move(tag));
  }

  /// Renders the source and fills `tags` with 1-based line numbers.
  std::string render(std::map<std::string, std::vector<int>>& tags) const {
    std::vector<std::string> out;
    out.push_back("// SPDX-License-Identifier: MIT");
    out.push_back("pragma solidity ^0.8.20;");
    out.push_back("import \"" + import_path + "\";");
    out.push_back("contract " + contract_name + " {");
    for (const auto& s : state) out.push_back("    " + s);
    std::string params;
    for (std::size_t i = 0; i < params_.size(); ++i) params += (i ? ", " : "") + params_[i];
    out.push_back("    function " + function_name + "(" + params + ") external" +
                  (mutability.empty() ? "" : " " + mutability) + " {");
    for (const auto& l : body) {
      out.push_back(std::string(8 + 4 * static_cast<std::size_t>(l.indent), ' ') + l.text);
      if (!l.tag.empty()) tags[l.tag].push_back(static_cast<int>(out.size()));
    }
    out.push_back("    }");
    out.push_back("}");
    std::string src;
    for (const auto& l : out) src += l + "\n";
    return src;
  }

 private:
  std::vector<std::string> params_;
};

}  // namespace factorscan::datagen::detail
