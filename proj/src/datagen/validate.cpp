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
#include <cctype>
#include <regex>
#include <set>

#include "factorscan/datagen/generators.hpp"
#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/minisol/cfg.hpp"
#include "factorscan/scoring/scoring.hpp"

namespace factorscan::datagen {

namespace {

using minisol::AnchorKind;
using minisol::Diagnostic;
using minisol::Stmt;
using minisol::StmtKind;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Offset of the first comment opener outside a string literal, or npos.
std::size_t comment_start(const std::string& line) {
  bool in_str = false;
  char quote = 0;
  for (std::size_t i = 0; i + 1 < line.size() + 1; ++i) {
    const char ch = line[i];
    if (in_str) {
      if (ch == '\\') ++i;
      else if (ch == quote) in_str = false;
      continue;
    }
    if (ch == '"' || ch == '\'') {
      in_str = true;
      quote = ch;
      continue;
    }
    if (ch == '/' && i + 1 < line.size() && (line[i + 1] == '/' || line[i + 1] == '*')) return i;
  }
  return std::string::npos;
}

/// Identifiers in code, skipping strings, comments and member names.
std::set<std::string> identifiers(const std::string& line) {
  std::string code;
  bool in_str = false;
  char quote = 0;
  const auto cut = comment_start(line);
  const std::string body = cut == std::string::npos ? line : line.substr(0, cut);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char ch = body[i];
    if (in_str) {
      if (ch == '\\') ++i;
      else if (ch == quote) in_str = false;
      code += ' ';
      continue;
    }
    if (ch == '"' || ch == '\'') {
      in_str = true;
      quote = ch;
      code += ' ';
      continue;
    }
    code += ch;
  }
  std::set<std::string> out;
  static const std::regex id(R"([A-Za-z_][A-Za-z0-9_]*)");
  for (std::sregex_iterator it(code.begin(), code.end(), id), end; it != end; ++it) {
    // Member names come from the interface, not from the generator.
    const auto pos = static_cast<std::size_t>(it->position());
    if (pos > 0 && code[pos - 1] == '.') continue;
    out.insert(it->str());
  }
  return out;
}

std::set<AnchorKind> allowed_anchors(Task t) {
  switch (t) {
    case Task::E: return {AnchorKind::ExtCall};
    case Task::D:
    case Task::Full: return {AnchorKind::ExtCall, AnchorKind::StateUpd};
    case Task::O: return {AnchorKind::Check, AnchorKind::Effect, AnchorKind::Interaction};
  }
  return {};
}

struct Ctx {
  std::vector<Diagnostic>& out;
  void add(int line, std::string code, std::string msg) { out.push_back({line, std::move(code), std::move(msg)}); }
};

const Stmt* stmt_at(const std::vector<const Stmt*>& flat, int line) {
  for (const Stmt* s : flat)
    if (s->line == line) return s;
  return nullptr;
}

int index_of(const std::vector<const Stmt*>& flat, int line) {
  for (std::size_t i = 0; i < flat.size(); ++i)
    if (flat[i]->line == line) return static_cast<int>(i);
  return -1;
}

std::vector<int> units_to_lines(const BitVector& v) {
  std::vector<int> out;
  for (int i = 0; i < v.size(); ++i)
    if (v(i)) out.push_back(i + 1);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

/// Checks the CHECK guard leads its block.
bool check_leads_block(const minisol::FunctionDef& fn, int check_line) {
  auto leads = [&](const std::vector<Stmt>& body) { return !body.empty() && body.front().line == check_line; };
  if (leads(fn.body)) return true;
  for (std::size_t i = 0; i < fn.body.size(); ++i) {
    const Stmt& s = fn.body[i];
    if (s.kind != StmtKind::If) continue;
    if (leads(s.then_body) || leads(s.else_body)) return true;
    // Early-return guard: CHECK follows the branch directly.
    const bool returns = !s.then_body.empty() && s.then_body.back().kind == StmtKind::Return && !s.has_else;
    if (returns && i + 1 < fn.body.size() && fn.body[i + 1].line == check_line) return true;
  }
  return false;
}

}  // namespace

ValidationResult validate(const LabeledSample& sample) {
  ValidationResult r;
  Ctx ctx{r.diagnostics};
  const Task task = sample.task;

  // Raw text checks.
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : sample.source) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  const int n = static_cast<int>(lines.size());
  static const std::regex import_re(R"(^import "[^"]+";$)");
  if (n < 3 || lines[0] != "// SPDX-License-Identifier: MIT" || lines[1] != "pragma solidity ^0.8.20;" ||
      !std::regex_match(lines[2], import_re))
    ctx.add(1, "BadHeader", "the first three lines must be the SPDX line, the pragma and one import");
  const auto allowed = allowed_anchors(task);
  for (int i = 0; i < n; ++i) {
    const std::string& l = lines[static_cast<std::size_t>(i)];
    if (trim(l).empty()) {
      ctx.add(i + 1, "EmptyLine", "empty lines are not allowed");
      continue;
    }
    if (i == 0) continue;
    const auto at = comment_start(l);
    if (at == std::string::npos) continue;
    const std::string t = trim(l);
    const auto kind = minisol::parse_anchor(t);
    if (!kind || l.substr(0, at).find_first_not_of(" \t") != std::string::npos)
      ctx.add(i + 1, "ForbiddenComment", "only anchor comments are allowed");
    else if (!allowed.count(*kind))
      ctx.add(i + 1, "AnchorNotAllowed", std::string(minisol::anchor_spelling(*kind)) + " is not used by this task");
  }
  if (task == Task::D && (n < 8 || n > 20))
    ctx.add(n, "LengthOutOfRange", "dependency samples span 8 to 20 lines, got " + std::to_string(n));
  if (n > 25) ctx.add(n, "TooLong", "samples are at most 25 lines, got " + std::to_string(n));
  if (task == Task::O) {
    for (int i = 3; i < n; ++i)
      for (const auto& id : identifiers(lines[static_cast<std::size_t>(i)]))
        if (std::find(avoided_identifiers().begin(), avoided_identifiers().end(), id) != avoided_identifiers().end())
          ctx.add(i + 1, "AvoidedIdentifier", "identifier '" + id + "' is on the avoid list");
    if (sample.source.find("string constant FP = \"") == std::string::npos)
      ctx.add(4, "MissingFingerprint", "the fingerprint constant is missing");
  }

  // Parse.
  auto parsed = minisol::parse(sample.source);
  for (const auto& e : parsed.errors) r.diagnostics.push_back(e);
  for (const auto& w : parsed.warnings)
    if (w.code == "MultipleExternalFunctions" || w.code == "LocalInterface" || w.code == "DeadCode")
      r.diagnostics.push_back(w);
  if (!parsed.ok()) return r;
  const auto& ast = parsed.ast;
  if (ast.functions.size() != 1) {
    ctx.add(ast.contract_line, "FunctionCount", "exactly one function is expected");
    return r;
  }
  const auto& fn = ast.functions.front();
  const auto flat = minisol::flatten(fn);
  if (task == Task::D && !ast.structs.empty())
    ctx.add(ast.structs.front().line, "ForbiddenConstruct", "structs are not used in dependency samples");

  // Anchors.
  std::vector<std::pair<AnchorKind, int>> seq;  // kind, target line, in source order
  for (const auto& [line, a] : parsed.unit.anchors) {
    seq.emplace_back(a.kind, a.target_line);
    const Stmt* s = stmt_at(flat, a.target_line);
    if (!s) continue;
    if ((a.kind == AnchorKind::StateUpd || a.kind == AnchorKind::Effect) && s->kind == StmtKind::Require)
      ctx.add(line, "AnchorOnGuard", "an update anchor is bound to a require");
    if (a.kind == AnchorKind::Check && s->kind != StmtKind::Require)
      ctx.add(line, "CheckNotGuard", "//CHECK must bind a require");
  }
  auto targets = [&](AnchorKind k) {
    std::vector<int> v;
    for (const auto& [kind, t] : seq)
      if (kind == k) v.push_back(t);
    return v;
  };
  const auto e_anchor = targets(task == Task::O ? AnchorKind::Interaction : AnchorKind::ExtCall);
  const auto s_anchor = targets(task == Task::O ? AnchorKind::Effect : AnchorKind::StateUpd);

  int n_calls = 0, n_ifs = 0;
  for (const Stmt* s : flat) {
    if (s->call) ++n_calls;
    if (s->kind == StmtKind::If) ++n_ifs;
  }

  const auto& L = sample.labels;
  switch (task) {
    case Task::E:
      if (e_anchor.size() != static_cast<std::size_t>(L.label))
        ctx.add(fn.line, "AnchorCount", "expected " + std::to_string(L.label) + " //e anchor(s)");
      break;
    case Task::D: {
      if (e_anchor.size() != 1 || s_anchor.size() != 1) {
        ctx.add(fn.line, "AnchorCount", "exactly one //e and one //s are required");
        break;
      }
      const int ie = index_of(flat, e_anchor[0]), is = index_of(flat, s_anchor[0]);
      if (std::abs(ie - is) < 2) ctx.add(s_anchor[0], "NonAdjacency", "//e and //s targets must not be adjacent");
      break;
    }
    case Task::O: {
      if (!L.cei_type) {
        ctx.add(fn.line, "InvalidLabel", "missing pattern type");
        break;
      }
      const auto pat = cei_pattern(*L.cei_type);
      std::vector<AnchorKind> kinds;
      for (const auto& [k, t] : seq) kinds.push_back(k);
      if (kinds != pat.anchor_sequence) ctx.add(fn.line, "AnchorOrder", "anchors do not follow the pattern");
      const auto checks = targets(AnchorKind::Check);
      if (checks.size() == 1 && !check_leads_block(fn, checks[0]))
        ctx.add(checks[0], "CheckNotFirst", "//CHECK must bind the first statement of its block");
      const bool path = *L.cei_type == CeiType::PATH_SENSITIVE_I_BEFORE_E;
      if (!path && n_ifs != 0) ctx.add(fn.line, "BranchForbidden", "branches are not allowed in this pattern");
      if (path && n_ifs != 1) ctx.add(fn.line, "BranchCount", "exactly one branch is required");
      break;
    }
    case Task::Full: {
      if (!L.factor_bits) {
        ctx.add(fn.line, "InvalidLabel", "missing factor bits");
        break;
      }
      const auto& b = *L.factor_bits;
      if (e_anchor.size() != static_cast<std::size_t>(b[0]) || s_anchor.size() != static_cast<std::size_t>(b[1]))
        ctx.add(fn.line, "AnchorCount", "anchors do not match the factor bits");
      if (n_ifs != 0) ctx.add(fn.line, "BranchForbidden", "branches are not allowed");
      break;
    }
  }
  if (task == Task::D && n_ifs > (L.dep_id == DepId::C_CTRL ? 1 : 0))
    ctx.add(fn.line, "BranchForbidden", "unexpected branch");
  if (task == Task::E && n_ifs > 1)
    ctx.add(fn.line, "BranchCount", "at most one branch");
  const int want_calls = static_cast<int>(L.call_lines.size());
  if (n_calls != want_calls)
    ctx.add(fn.line, "CallCount", "expected " + std::to_string(want_calls) + " external call(s), found " +
                                      std::to_string(n_calls));

  if (!r.ok()) return r;

  // Re-analysis.
  ProgramUnit prog;
  try {
    prog = build_program(std::move(parsed));
  } catch (const Error& e) {
    ctx.add(0, e.code(), e.what());
    return r;
  }
  const FactorSet fs = analyze(prog);
  const auto calls = units_to_lines(fs.phi_E);
  const auto ups = units_to_lines(fs.phi_S);
  if (calls != L.call_lines)
    ctx.add(0, "LabelMismatch", "calls " + join(calls) + " vs labelled " + join(L.call_lines));
  if (ups != L.update_lines)
    ctx.add(0, "LabelMismatch", "updates " + join(ups) + " vs labelled " + join(L.update_lines));
  if (e_anchor != L.call_lines) ctx.add(0, "AnchorMismatch", "call anchors disagree with the labels");
  if (task != Task::E && s_anchor != L.update_lines)
    ctx.add(0, "AnchorMismatch", "update anchors disagree with the labels");
  if (task == Task::O && L.check_line && targets(AnchorKind::Check) != std::vector<int>{*L.check_line})
    ctx.add(0, "AnchorMismatch", "check anchor disagrees with the label");
  if (!r.ok()) return r;

  auto D = [&](int c, int u) { return static_cast<int>(fs.phi_D(c - 1, u - 1)); };
  auto O = [&](int c, int u) { return static_cast<int>(fs.phi_O(c - 1, u - 1)); };
  auto K = [&](int c, int u) { return static_cast<DepKind>(fs.dep_kind(c - 1, u - 1)); };
  const bool verdict = boolean_rule(fs).vulnerable;

  switch (task) {
    case Task::E:
      if (!ups.empty()) ctx.add(ups.front(), "LabelMismatch", "call samples must not write state");
      break;
    case Task::D: {
      const int c = calls.at(0), u = ups.at(0);
      const int want = L.dep_id == DepId::Z_NONE ? 0 : 1;
      if (D(c, u) != want) ctx.add(u, "LabelMismatch", "phi_D is " + std::to_string(D(c, u)));
      if (L.dep_kind && K(c, u) != *L.dep_kind)
        ctx.add(u, "LabelMismatch",
                std::string("dependency kind is ") + to_string(K(c, u)) + ", labelled " + to_string(*L.dep_kind));
      if (L.direction && want) {
        const bool e_first = c < u;
        if (e_first != (*L.direction == Direction::E_TO_S))
          ctx.add(u, "LabelMismatch", "direction disagrees with statement order");
      }
      break;
    }
    case Task::O: {
      const int c = calls.at(0);
      const auto type = *L.cei_type;
      if (type == CeiType::POST_INTERACTION_EFFECTS) {
        if (ups.size() != 2) {
          ctx.add(c, "UpdateCount", "two effects are required");
          break;
        }
        if (D(c, ups[0]) != 1 || O(c, ups[0]) != 1)
          ctx.add(ups[0], "LabelMismatch", "the leading effect must be dependent and precede the call");
        if (D(c, ups[1]) != 1 || O(c, ups[1]) != -1)
          ctx.add(ups[1], "LabelMismatch", "the trailing effect must be dependent and follow the call");
      } else {
        if (ups.size() != 1) {
          ctx.add(c, "UpdateCount", "exactly one effect is required");
          break;
        }
        const int want = type == CeiType::CEI_OK ? 1 : -1;
        if (D(c, ups[0]) != 1 || O(c, ups[0]) != want)
          ctx.add(ups[0], "LabelMismatch",
                  "phi_D=" + std::to_string(D(c, ups[0])) + " phi_O=" + std::to_string(O(c, ups[0])));
      }
      break;
    }
    case Task::Full: {
      const auto& b = *L.factor_bits;
      if (b[0] && b[1]) {
        const int c = calls.at(0), u = ups.at(0);
        if (D(c, u) != b[2]) ctx.add(u, "LabelMismatch", "phi_D disagrees with the dependency bit");
        const int want_o = b[2] ? (b[3] ? -1 : 1) : 0;
        if (O(c, u) != want_o) ctx.add(u, "LabelMismatch", "phi_O disagrees with the ordering bit");
      }
      break;
    }
  }
  if (L.vulnerable && verdict != *L.vulnerable)
    ctx.add(0, "LabelMismatch", std::string("rule verdict is ") + (verdict ? "vulnerable" : "safe"));
  return r;
}

}  // namespace factorscan::datagen
