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

#include "factorscan/factors/program.hpp"

#include "factorscan/error.hpp"

namespace factorscan {
namespace {

void depths(const std::vector<minisol::Stmt>& body, int d, std::vector<int>& out) {
  for (const auto& s : body) {
    out.push_back(d);
    if (s.kind == minisol::StmtKind::If) {
      depths(s.then_body, d + 1, out);
      depths(s.else_body, d + 1, out);
    }
  }
}

}  // namespace

ProgramUnit build_program(minisol::ParseResult parsed) {
  if (!parsed.ok()) {
    const auto& d = parsed.errors.front();
    throw Error(d.code, "line " + std::to_string(d.line) + ": " + d.msg);
  }
  ProgramUnit p;
  p.parsed = std::make_shared<const minisol::ParseResult>(std::move(parsed));
  for (const auto& fn : p.parsed->ast.functions) {
    FunctionGraph g;
    g.fn = &fn;
    g.stmts = minisol::flatten(fn);
    depths(fn.body, 0, g.depth);
    g.cfg = minisol::build_cfg(fn);
    g.du = minisol::build_defuse(p.parsed->ast, fn);
    p.functions.push_back(std::move(g));
  }
  return p;
}

ProgramUnit build_program(std::string_view source) { return build_program(minisol::parse(source)); }

}  // namespace factorscan
