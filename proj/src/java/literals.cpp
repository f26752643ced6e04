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

#include "stubforge/java/literals.hpp"

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <sstream>

#include "stubforge/error.hpp"

namespace stubforge::java {

namespace {

std::string without_underscores(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != '_') s.push_back(c);
  return s;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Interprets escapes in the body of a literal (quotes already removed).
std::string interpret_escapes(std::string_view body) {
  std::string out;
  std::uint32_t pending_high = 0;
  auto flush_high = [&] {
    if (pending_high) append_utf8(out, pending_high);
    pending_high = 0;
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\' || i + 1 == body.size()) {
      flush_high();
      out.push_back(c);
      continue;
    }
    char e = body[++i];
    if (e == 'u') {
      while (i + 1 < body.size() && body[i + 1] == 'u') ++i;
      std::uint32_t cp = 0;
      for (int k = 0; k < 4 && i + 1 < body.size(); ++k) cp = cp * 16 + hex_value(body[++i]);
      if (cp >= 0xD800 && cp <= 0xDBFF) {
        flush_high();
        pending_high = cp;
      } else if (cp >= 0xDC00 && cp <= 0xDFFF && pending_high) {
        append_utf8(out, 0x10000 + ((pending_high - 0xD800) << 10) + (cp - 0xDC00));
        pending_high = 0;
      } else {
        flush_high();
        append_utf8(out, cp);
      }
      continue;
    }
    flush_high();
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'b': out.push_back('\b'); break;
      case 'r': out.push_back('\r'); break;
      case 'f': out.push_back('\f'); break;
      case 's': out.push_back(' '); break;
      case '\n': break;  // line continuation in text blocks
      case '0': case '1': case '2': case '3': case '4': case '5': case '6': case '7': {
        int limit = e <= '3' ? 3 : 2;
        std::uint32_t v = static_cast<std::uint32_t>(e - '0');
        for (int k = 1; k < limit && i + 1 < body.size() && body[i + 1] >= '0' && body[i + 1] <= '7'; ++k)
          v = v * 8 + static_cast<std::uint32_t>(body[++i] - '0');
        append_utf8(out, v);
        break;
      }
      default: out.push_back(e); break;
    }
  }
  flush_high();
  return out;
}

std::string strip_text_block_indent(std::string_view content) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : content) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);  // the line holding the closing delimiter
  auto blank = [](const std::string& s) { return s.find_first_not_of(" \t\f") == std::string::npos; };
  std::size_t indent = std::string::npos;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    bool last = i + 1 == lines.size();
    if (blank(lines[i]) && !last) continue;
    std::size_t lead = blank(lines[i]) ? lines[i].size() : lines[i].find_first_not_of(" \t\f");
    indent = std::min(indent, lead);
  }
  if (indent == std::string::npos) indent = 0;
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i].size() >= indent ? lines[i].substr(indent) : std::string();
    if (!blank(line)) {
      std::size_t end = line.find_last_not_of(" \t\f");
      line = line.substr(0, end + 1);
    } else {
      line.clear();
    }
    out += line;
    if (i + 1 < lines.size()) out.push_back('\n');
  }
  return out;
}

}  // namespace

std::string normalize_integer_literal(std::string_view text) {
  std::string s = without_underscores(text);
  bool is_long = !s.empty() && (s.back() == 'l' || s.back() == 'L');
  if (is_long) s.pop_back();
  int base = 10;
  std::size_t start = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    start = 2;
  } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    start = 2;
  } else if (s.size() > 1 && s[0] == '0') {
    base = 8;
    start = 1;
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseFailure, "bad integer literal '" + std::string(text) + "'");
  if (base == 10) return std::to_string(v);
  if (is_long) return std::to_string(static_cast<std::int64_t>(v));
  return std::to_string(static_cast<std::int32_t>(static_cast<std::uint32_t>(v)));
}

std::string normalize_float_literal(std::string_view text) {
  std::string s = without_underscores(text);
  bool single = false;
  if (!s.empty() && (s.back() == 'f' || s.back() == 'F')) {
    single = true;
    s.pop_back();
  } else if (!s.empty() && (s.back() == 'd' || s.back() == 'D')) {
    s.pop_back();
  }
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw Error(ErrorCode::ParseFailure, "bad floating literal '" + std::string(text) + "'");
  char buf[64];
  std::to_chars_result r = single ? std::to_chars(buf, buf + sizeof buf, static_cast<float>(d))
                                  : std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

std::string unescape_string_literal(std::string_view text) {
  if (text.size() >= 6 && text.substr(0, 3) == "\"\"\"") {
    std::string_view inner = text.substr(3, text.size() - 6);
    std::size_t nl = inner.find('\n');
    inner = nl == std::string_view::npos ? std::string_view() : inner.substr(nl + 1);
    return interpret_escapes(strip_text_block_indent(inner));
  }
  if (text.size() >= 2) return interpret_escapes(text.substr(1, text.size() - 2));
  return std::string(text);
}

std::optional<std::string> normalize_literal(const std::vector<Token>& tokens, TokenRange range) {
  std::size_t i = range.begin;
  bool negative = false;
  if (range.size() == 2 && tokens[i].is("-")) {
    negative = true;
    ++i;
  } else if (range.size() != 1) {
    return std::nullopt;
  }
  const Token& t = tokens[i];
  switch (t.kind) {
    case TokenKind::IntLiteral: {
      std::string v = normalize_integer_literal(t.text);
      if (!negative) return v;
      if (v == "0") return v;
      return v[0] == '-' ? v.substr(1) : "-" + v;
    }
    case TokenKind::FloatLiteral: {
      std::string v = normalize_float_literal(t.text);
      if (!negative) return v;
      return v[0] == '-' ? v.substr(1) : "-" + v;
    }
    case TokenKind::StringLiteral:
    case TokenKind::TextBlock:
      if (negative) return std::nullopt;
      return unescape_string_literal(t.text);
    default:
      return std::nullopt;
  }
}

}  // namespace stubforge::java
