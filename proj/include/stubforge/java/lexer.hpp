// Copyright 2026 The Stubforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stubforge::java {

enum class TokenKind {
  Identifier,
  Keyword,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  CharLiteral,
  TextBlock,
  Operator,
  Separator,
  At,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 0;       // 1-based line of the first character
  int end_line = 0;   // line of the last character (differs for text blocks)
  int column = 0;     // 1-based
  std::size_t offset = 0;  // byte offset into the source
  std::size_t length = 0;

  bool is(std::string_view t) const { return text == t && kind != TokenKind::StringLiteral &&
                                             kind != TokenKind::CharLiteral && kind != TokenKind::TextBlock; }
  bool is_literal() const {
    return kind == TokenKind::IntLiteral || kind == TokenKind::FloatLiteral ||
           kind == TokenKind::StringLiteral || kind == TokenKind::CharLiteral ||
           kind == TokenKind::TextBlock;
  }
};

/// Tokenizes Java source. Comments and whitespace are dropped; the result
/// always ends with a single End token. Throws Error(ParseFailure) on an
/// unterminated comment, string or character literal.
std::vector<Token> tokenize(std::string_view source);

bool is_java_keyword(std::string_view word);

}  // namespace stubforge::java
