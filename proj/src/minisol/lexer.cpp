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

#include "lexer.hpp"

#include <array>
#include <cctype>

namespace factorscan::minisol::detail {
namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Longest-match punctuation, three characters first.
constexpr std::array<std::string_view, 27> kPuncts = {
    "**=", ">>=", "<<=", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%=",
    "|=",  "&=",  "^=",  "++", "--", "<<", ">>", "=>", "**", "->", ":=", "..", "::"};

}  // namespace

LexResult lex(std::string_view src) {
  LexResult out;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto fail = [&](const std::string& msg) {
    out.error_line = line;
    out.error = msg;
  };
  while (i < n) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t j = src.find('\n', i);
      if (j == std::string_view::npos) j = n;
      out.comments.push_back({line, std::string(src.substr(i, j - i)), false});
      i = j;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t j = src.find("*/", i + 2);
      if (j == std::string_view::npos) {
        fail("unterminated block comment");
        break;
      }
      out.comments.push_back({line, std::string(src.substr(i, j + 2 - i)), true});
      for (std::size_t k = i; k < j; ++k)
        if (src[k] == '\n') ++line;
      i = j + 2;
      continue;
    }
    Token t;
    t.line = line;
    t.begin = i;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && ident_char(src[j])) ++j;
      t.kind = Tok::Ident;
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      if (c == '0' && j < n && (src[j] == 'x' || src[j] == 'X')) {
        ++j;
        while (j < n && (std::isxdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      } else {
        while (j < n && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                         src[j] == '.' || src[j] == 'e' || src[j] == 'E'))
          ++j;
      }
      t.kind = Tok::Number;
      i = j;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && src[j] != c) {
        if (src[j] == '\\') ++j;
        if (j < n && src[j] == '\n') break;
        ++j;
      }
      if (j >= n || src[j] != c) {
        fail("unterminated string literal");
        break;
      }
      t.kind = Tok::String;
      i = j + 1;
    } else {
      t.kind = Tok::Punct;
      std::size_t len = 1;
      for (auto p : kPuncts) {
        if (src.substr(i, p.size()) == p) {
          len = p.size();
          break;
        }
      }
      i += len;
    }
    t.end = i;
    t.text = std::string(src.substr(t.begin, t.end - t.begin));
    out.tokens.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.begin = end.end = n;
  out.tokens.push_back(end);
  return out;
}

}  // namespace factorscan::minisol::detail
