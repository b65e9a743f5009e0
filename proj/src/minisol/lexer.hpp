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

namespace factorscan::minisol::detail {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 0;
  std::size_t begin = 0;  // byte offset into the source
  std::size_t end = 0;
};

struct Comment {
  int line = 0;
  std::string text;  // including the leading slashes
  bool block = false;
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<Comment> comments;
  int error_line = 0;  // nonzero if lexing failed
  std::string error;
};

// Splits MiniSol text into tokens. Comments are stripped from the token
// stream and reported separately so the parser can recover the preamble.
LexResult lex(std::string_view src);

}  // namespace factorscan::minisol::detail
