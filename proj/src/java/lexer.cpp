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

#include "stubforge/java/lexer.hpp"

#include <algorithm>
#include <array>

#include "stubforge/error.hpp"

namespace stubforge::java {
namespace {

constexpr std::array<std::string_view, 51> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",      "case",     "catch",
    "char",     "class",      "const",     "continue",  "default",   "do",       "double",
    "else",     "enum",       "extends",   "final",     "finally",   "float",    "for",
    "goto",     "if",         "implements", "import",   "instanceof", "int",     "interface",
    "long",     "native",     "new",       "package",   "private",   "protected", "public",
    "return",   "short",      "static",    "strictfp",  "super",     "switch",   "synchronized",
    "this",     "throw",      "throws",    "transient", "try",       "void",     "volatile",
    "while",    "_"};

// Longest first so that greedy matching works. '>' is never merged with a
// following '>' so generic closers like List<List<T>> stay separate tokens.
constexpr std::array<std::string_view, 32> kOperators = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=",  "&=",  "|=", "^=", "%=", "<<", "=",  "<",  ">",  "!",  "~",  "?",  ":",  "+",  "-",
    "*",   "/"};

constexpr std::string_view kSingleOperators = "&|^%";
constexpr std::string_view kSeparators = "(){}[];,.@";

bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool hex_digit(unsigned char c) {
  return digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = end.end_line = line_;
    end.column = column();
    end.offset = src_.size();
    out.push_back(end);
    return out;
  }

 private:
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(const std::string& what, int line) const {
    throw Error(ErrorCode::ParseFailure, what + " at line " + std::to_string(line));
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int start = line_;
        advance();
        advance();
        while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) fail("unterminated comment", start);
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t start, int line, int col) {
    Token t;
    t.kind = kind;
    t.offset = start;
    t.length = pos_ - start;
    t.text = std::string(src_.substr(start, t.length));
    t.line = line;
    t.end_line = line_;
    t.column = col;
    return t;
  }

  Token next() {
    std::size_t start = pos_;
    int line = line_;
    int col = column();
    unsigned char c = static_cast<unsigned char>(src_[pos_]);

    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(src_[pos_]))) advance();
      Token t = make(TokenKind::Identifier, start, line, col);
      if (is_java_keyword(t.text)) t.kind = TokenKind::Keyword;
      return t;
    }
    if (digit(c) || (c == '.' && digit(static_cast<unsigned char>(peek(1))))) {
      return number(start, line, col);
    }
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') return text_block(start, line, col);
      return quoted('"', TokenKind::StringLiteral, start, line, col);
    }
    if (c == '\'') return quoted('\'', TokenKind::CharLiteral, start, line, col);
    if (c == '@') {
      advance();
      return make(TokenKind::At, start, line, col);
    }
    if (kSeparators.find(static_cast<char>(c)) != std::string_view::npos) {
      advance();
      return make(TokenKind::Separator, start, line, col);
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i) advance();
        return make(TokenKind::Operator, start, line, col);
      }
    }
    if (kSingleOperators.find(static_cast<char>(c)) != std::string_view::npos) {
      advance();
      return make(TokenKind::Operator, start, line, col);
    }
    fail(std::string("unexpected character '") + static_cast<char>(c) + "'", line);
  }

  Token number(std::size_t start, int line, int col) {
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      while (hex_digit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' || peek() == 'p' || peek() == 'P') {
        is_float = true;
        if (peek() == '.') advance();
        while (hex_digit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
        if (peek() == 'p' || peek() == 'P') {
          advance();
          if (peek() == '+' || peek() == '-') advance();
          while (digit(static_cast<unsigned char>(peek()))) advance();
        }
      }
    } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      advance();
      advance();
      while (peek() == '0' || peek() == '1' || peek() == '_') advance();
    } else {
      while (digit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' && digit(static_cast<unsigned char>(peek(1)))) {
        is_float = true;
        advance();
        while (digit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      } else if (peek() == '.' && !ident_start(static_cast<unsigned char>(peek(1))) &&
                 peek(1) != '.') {
        // "1." is a valid double literal
        is_float = true;
        advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (digit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    char s = peek();
    if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
      is_float = true;
      advance();
    } else if (s == 'l' || s == 'L') {
      advance();
    }
    return make(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, start, line, col);
  }

  Token quoted(char quote, TokenKind kind, std::size_t start, int line, int col) {
    advance();
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated literal", line);
      char c = src_[pos_];
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) fail("unterminated literal", line);
        advance();
        continue;
      }
      advance();
      if (c == quote) break;
    }
    return make(kind, start, line, col);
  }

  Token text_block(std::size_t start, int line, int col) {
    advance();
    advance();
    advance();
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated text block", line);
      if (src_[pos_] == '\\') {
        advance();
        if (pos_ < src_.size()) advance();
        continue;
      }
      if (src_[pos_] == '"' && peek(1) == '"' && peek(2) == '"') {
        advance();
        advance();
        advance();
        break;
      }
      advance();
    }
    return make(TokenKind::TextBlock, start, line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

}  // namespace

bool is_java_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace stubforge::java
