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

#include "stubforge/java/parser.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include "stubforge/error.hpp"

namespace stubforge::java {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Block: return "Block";
    case NodeKind::If: return "If";
    case NodeKind::For: return "For";
    case NodeKind::ForEach: return "ForEach";
    case NodeKind::While: return "While";
    case NodeKind::DoWhile: return "DoWhile";
    case NodeKind::Switch: return "Switch";
    case NodeKind::CaseLabel: return "CaseLabel";
    case NodeKind::Try: return "Try";
    case NodeKind::Catch: return "Catch";
    case NodeKind::Finally: return "Finally";
    case NodeKind::Return: return "Return";
    case NodeKind::Throw: return "Throw";
    case NodeKind::Yield: return "Yield";
    case NodeKind::Break: return "Break";
    case NodeKind::Continue: return "Continue";
    case NodeKind::Assert: return "Assert";
    case NodeKind::Synchronized: return "Synchronized";
    case NodeKind::Labeled: return "Labeled";
    case NodeKind::LocalVar: return "LocalVar";
    case NodeKind::Expression: return "Expression";
    case NodeKind::Empty: return "Empty";
    case NodeKind::LocalClass: return "LocalClass";
    case NodeKind::Lambda: return "Lambda";
    case NodeKind::AnonymousClass: return "AnonymousClass";
  }
  return "?";
}

bool MethodDecl::has_annotation(std::string_view simple) const {
  return std::any_of(annotations.begin(), annotations.end(),
                     [&](const Annotation& a) { return a.name == simple; });
}

bool TypeDecl::has_annotation(std::string_view simple) const {
  return std::any_of(annotations.begin(), annotations.end(),
                     [&](const Annotation& a) { return a.name == simple; });
}

std::string_view CompilationUnit::text(TokenRange range) const {
  if (range.empty()) return {};
  const Token& first = tokens[range.begin];
  const Token& last = tokens[range.end - 1];
  return std::string_view(source).substr(first.offset, last.offset + last.length - first.offset);
}

std::string strip_generics(std::string_view type_text) {
  std::string out;
  int depth = 0;
  for (char c : type_text) {
    if (c == '<') {
      ++depth;
    } else if (c == '>') {
      if (depth > 0) --depth;
    } else if (depth == 0 && c != '[' && c != ']' && c != ' ' && c != '\t' && c != '\n' &&
               c != '\r') {
      out.push_back(c);
    }
  }
  if (out.size() >= 3 && out.compare(out.size() - 3, 3, "...") == 0) out.resize(out.size() - 3);
  return out;
}

std::string_view simple_name(std::string_view dotted) {
  auto pos = dotted.rfind('.');
  return pos == std::string_view::npos ? dotted : dotted.substr(pos + 1);
}

namespace {

constexpr std::array<std::string_view, 13> kModifierKeywords = {
    "public",   "private",      "protected", "static",    "final",   "abstract", "native",
    "strictfp", "synchronized", "transient", "volatile", "default", "sealed"};

constexpr std::array<std::string_view, 8> kPrimitives = {"boolean", "byte", "char",  "short",
                                                         "int",     "long", "float", "double"};

bool is_primitive(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         std::find(kPrimitives.begin(), kPrimitives.end(), t.text) != kPrimitives.end();
}

}  // namespace

/// Returns the index just past the '>' that closes the type-argument list
/// starting at `open` (which must be '<'), or `open` when the tokens there do
/// not look like type arguments.
std::size_t skip_type_arguments(const std::vector<Token>& tokens, std::size_t open) {
  if (open >= tokens.size() || !tokens[open].is("<")) return open;
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.is("<")) {
      ++depth;
    } else if (t.is(">")) {
      if (--depth == 0) return i + 1;
    } else if (t.kind == TokenKind::Identifier || is_primitive(t) || t.is(".") || t.is(",") ||
               t.is("?") || t.is("extends") || t.is("super") || t.is("&") || t.is("[") ||
               t.is("]") || t.kind == TokenKind::At) {
      continue;
    } else {
      return open;
    }
  }
  return open;
}

namespace {

class Parser {
 public:
  explicit Parser(CompilationUnit& unit) : unit_(unit), toks_(unit.tokens) {}

  void parse() {
    std::vector<Annotation> annotations;
    std::vector<std::string> modifiers;
    std::size_t start = pos_;
    parse_modifiers(annotations, modifiers);
    if (at("package")) {
      advance();
      unit_.package_name = parse_qualified_name();
      expect(";");
      annotations.clear();
      modifiers.clear();
      start = pos_;
      parse_modifiers(annotations, modifiers);
    }
    while (at("import")) {
      advance();
      Import imp;
      if (at("static")) {
        imp.is_static = true;
        advance();
      }
      imp.name = ident_text();
      advance();
      while (at(".")) {
        advance();
        if (at("*")) {
          imp.wildcard = true;
          advance();
          break;
        }
        imp.name += "." + ident_text();
        advance();
      }
      expect(";");
      unit_.imports.push_back(std::move(imp));
      start = pos_;
      parse_modifiers(annotations, modifiers);
    }
    while (cur().kind != TokenKind::End) {
      if (at(";")) {
        advance();
      } else {
        if (!starts_type_decl()) fail("expected a type declaration");
        unit_.types.push_back(parse_type_decl(std::move(annotations), std::move(modifiers), start,
                                              unit_.package_name));
      }
      annotations = {};
      modifiers = {};
      start = pos_;
      parse_modifiers(annotations, modifiers);
    }
  }

 private:
  // ---- token helpers ---------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(std::string_view t) const { return cur().is(t); }
  void advance() {
    if (cur().kind != TokenKind::End) ++pos_;
  }
  bool accept(std::string_view t) {
    if (!at(t)) return false;
    advance();
    return true;
  }
  void expect(std::string_view t) {
    if (!accept(t)) fail("expected '" + std::string(t) + "'");
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = cur();
    std::string found = t.kind == TokenKind::End ? "end of file" : "'" + t.text + "'";
    throw Error(ErrorCode::ParseFailure, unit_.path + ":" + std::to_string(t.line) + ": " + what +
                                             ", found " + found);
  }
  bool is_ident(const Token& t) const { return t.kind == TokenKind::Identifier; }
  std::string ident_text() const {
    if (!is_ident(cur())) fail("expected identifier");
    return cur().text;
  }
  int prev_line() const { return pos_ > 0 ? toks_[pos_ - 1].end_line : cur().line; }

  std::string parse_qualified_name() {
    std::string name = ident_text();
    advance();
    while (at(".") && is_ident(peek())) {
      advance();
      name += "." + cur().text;
      advance();
    }
    return name;
  }

  // Skips from an opening bracket to just past its matching closer.
  void skip_balanced(std::string_view open, std::string_view close) {
    if (!at(open)) fail("expected '" + std::string(open) + "'");
    int depth = 0;
    while (cur().kind != TokenKind::End) {
      if (at(open)) {
        ++depth;
      } else if (at(close)) {
        if (--depth == 0) {
          advance();
          return;
        }
      }
      advance();
    }
    fail("unbalanced '" + std::string(open) + "'");
  }

  // ---- declarations ----------------------------------------------------

  Annotation parse_annotation() {
    Annotation a;
    a.line = cur().line;
    expect("@");
    a.full_name = parse_qualified_name();
    a.name = std::string(simple_name(a.full_name));
    if (at("(")) {
      std::size_t open = pos_;
      skip_balanced("(", ")");
      a.arguments = {open + 1, pos_ - 1};
    }
    return a;
  }

  bool is_modifier_here() const {
    const Token& t = cur();
    if (t.kind == TokenKind::Keyword || t.is("sealed")) {
      if (std::find(kModifierKeywords.begin(), kModifierKeywords.end(), t.text) ==
          kModifierKeywords.end())
        return false;
      if (t.is("default") && (peek().is(":") || peek().is("->"))) return false;
      if (t.is("synchronized") && peek().is("(")) return false;
      if (t.is("sealed") && !(peek().kind == TokenKind::Keyword || is_ident(peek())))
        return false;
      return true;
    }
    return t.is("non") && peek().is("-") && peek(2).is("sealed");
  }

  void parse_modifiers(std::vector<Annotation>& annotations, std::vector<std::string>& modifiers) {
    while (true) {
      if (cur().kind == TokenKind::At && !peek().is("interface")) {
        annotations.push_back(parse_annotation());
      } else if (is_modifier_here()) {
        if (at("non")) {
          advance();
          advance();
          modifiers.emplace_back("non-sealed");
        } else {
          modifiers.push_back(cur().text);
        }
        advance();
      } else {
        return;
      }
    }
  }

  bool starts_type_decl() const {
    if (at("class") || at("interface") || at("enum")) return true;
    if (cur().kind == TokenKind::At && peek().is("interface")) return true;
    return at("record") && is_ident(peek()) && (peek(2).is("(") || peek(2).is("<"));
  }

  std::string parse_type() {
    std::size_t start = pos_;
    while (cur().kind == TokenKind::At) parse_annotation();
    if (!(is_ident(cur()) || is_primitive(cur()) || at("void"))) fail("expected a type");
    advance();
    while (true) {
      if (at("<")) {
        std::size_t after = skip_type_arguments(toks_, pos_);
        if (after == pos_) fail("malformed type arguments");
        pos_ = after;
      } else if (at(".") && (is_ident(peek()) || peek().kind == TokenKind::At)) {
        advance();
        while (cur().kind == TokenKind::At) parse_annotation();
        advance();
      } else if (at("[") && peek().is("]")) {
        advance();
        advance();
      } else {
        break;
      }
    }
    return std::string(unit_.text({start, pos_}));
  }

  std::vector<std::string> parse_type_list() {
    std::vector<std::string> out;
    out.push_back(strip_generics(parse_type()));
    while (accept(",")) out.push_back(strip_generics(parse_type()));
    return out;
  }

  TypeDecl parse_type_decl(std::vector<Annotation> annotations, std::vector<std::string> modifiers,
                           std::size_t start, const std::string& outer) {
    TypeDecl type;
    type.annotations = std::move(annotations);
    type.modifiers = std::move(modifiers);
    type.start_line = toks_[start].line;
    if (accept("class")) {
      type.kind = TypeKind::Class;
    } else if (accept("interface")) {
      type.kind = TypeKind::Interface;
    } else if (accept("enum")) {
      type.kind = TypeKind::Enum;
    } else if (at("record")) {
      advance();
      type.kind = TypeKind::Record;
    } else {
      expect("@");
      expect("interface");
      type.kind = TypeKind::Annotation;
    }
    type.name = ident_text();
    advance();
    type.qualified_name = outer.empty() ? type.name : outer + "." + type.name;
    if (at("<")) skip_balanced("<", ">");
    if (type.kind == TypeKind::Record) skip_balanced("(", ")");
    if (accept("extends")) type.extends = parse_type_list();
    if (accept("implements")) type.implements = parse_type_list();
    if (accept("permits")) parse_type_list();
    parse_class_body(type);
    type.span = {start, pos_};
    type.end_line = toks_[pos_ - 1].line;
    return type;
  }

  void parse_enum_constants() {
    while (!at(";") && !at("}")) {
      while (cur().kind == TokenKind::At) parse_annotation();
      ident_text();
      advance();
      if (at("(")) skip_balanced("(", ")");
      if (at("{")) skip_balanced("{", "}");
      if (!accept(",")) break;
    }
    accept(";");
  }

  void parse_class_body(TypeDecl& type) {
    expect("{");
    if (type.kind == TypeKind::Enum) parse_enum_constants();
    while (!at("}")) {
      if (cur().kind == TokenKind::End) fail("unterminated class body");
      if (accept(";")) continue;
      std::size_t start = pos_;
      if (at("{") || (at("static") && peek().is("{"))) {
        accept("static");
        type.initializers.push_back(parse_block());
        continue;
      }
      std::vector<Annotation> annotations;
      std::vector<std::string> modifiers;
      parse_modifiers(annotations, modifiers);
      if (starts_type_decl()) {
        type.nested.push_back(parse_type_decl(std::move(annotations), std::move(modifiers), start,
                                              type.qualified_name));
        continue;
      }
      if (at("<")) skip_balanced("<", ">");
      if (is_ident(cur()) && (peek().is("(") || (peek().is("{") && cur().text == type.name))) {
        MethodDecl m;
        m.is_constructor = true;
        m.name = cur().text;
        advance();
        m.annotations = std::move(annotations);
        m.modifiers = std::move(modifiers);
        parse_method_rest(m, start, /*compact=*/at("{"));
        type.methods.push_back(std::move(m));
        continue;
      }
      std::string declared_type = parse_type();
      std::string name = ident_text();
      int name_line = cur().line;
      advance();
      if (at("(")) {
        MethodDecl m;
        m.name = std::move(name);
        m.return_type = std::move(declared_type);
        m.annotations = std::move(annotations);
        m.modifiers = std::move(modifiers);
        parse_method_rest(m, start, false);
        type.methods.push_back(std::move(m));
        continue;
      }
      FieldDecl f;
      f.annotations = std::move(annotations);
      f.modifiers = std::move(modifiers);
      f.type_text = std::move(declared_type);
      f.line = toks_[start].line;
      while (true) {
        VariableDeclarator d;
        d.name = name;
        d.line = name_line;
        while (at("[")) skip_balanced("[", "]");
        if (accept("=")) {
          std::size_t init_start = pos_;
          scan_expression({",", ";"});
          d.initializer = {init_start, pos_};
        }
        f.declarators.push_back(std::move(d));
        if (accept(",")) {
          name = ident_text();
          name_line = cur().line;
          advance();
          continue;
        }
        expect(";");
        break;
      }
      f.span = {start, pos_};
      type.fields.push_back(std::move(f));
    }
    expect("}");
  }

  void parse_method_rest(MethodDecl& m, std::size_t start, bool compact) {
    m.start_line = toks_[start].line;
    if (!compact) {
      expect("(");
      while (!at(")")) {
        Parameter p;
        std::vector<std::string> mods;
        parse_modifiers(p.annotations, mods);
        p.type_text = parse_type();
        while (cur().kind == TokenKind::At) parse_annotation();
        if (accept("...")) p.varargs = true;
        if (at("this")) {
          p.name = "this";
          advance();
        } else {
          p.name = ident_text();
          advance();
        }
        while (at("[")) skip_balanced("[", "]");
        m.parameters.push_back(std::move(p));
        if (!accept(",")) break;
      }
      expect(")");
      while (at("[")) skip_balanced("[", "]");
      if (accept("throws")) parse_type_list();
      if (accept("default")) {
        scan_expression({";"});
      }
    }
    if (at("{")) {
      m.body = parse_block();
    } else {
      expect(";");
    }
    m.span = {start, pos_};
    m.end_line = toks_[pos_ - 1].line;
  }

  // ---- statements --------------------------------------------------------

  Node begin(NodeKind kind) const {
    Node n;
    n.kind = kind;
    n.tokens.begin = pos_;
    n.line = cur().line;
    return n;
  }
  Node finish(Node n) const {
    n.tokens.end = pos_;
    return n;
  }

  Node parse_block() {
    Node block = begin(NodeKind::Block);
    expect("{");
    while (!at("}")) {
      if (cur().kind == TokenKind::End) fail("unterminated block");
      block.children.push_back(parse_statement());
    }
    expect("}");
    return finish(std::move(block));
  }

  Node paren_condition() {
    expect("(");
    Node cond = scan_expression({")"});
    expect(")");
    return cond;
  }

  bool looks_like_local_var() const {
    std::size_t i = pos_;
    while (true) {
      if (toks_[i].kind == TokenKind::At) {
        ++i;
        while (toks_[i].kind == TokenKind::Identifier || toks_[i].is(".")) ++i;
        if (toks_[i].is("(")) {
          int depth = 0;
          for (; toks_[i].kind != TokenKind::End; ++i) {
            if (toks_[i].is("(")) ++depth;
            if (toks_[i].is(")") && --depth == 0) break;
          }
          ++i;
        }
      } else if (toks_[i].is("final")) {
        ++i;
      } else {
        break;
      }
    }
    if (!(is_ident(toks_[i]) || is_primitive(toks_[i]))) return false;
    ++i;
    while (true) {
      if (toks_[i].is("<")) {
        std::size_t after = skip_type_arguments(toks_, i);
        if (after == i) return false;
        i = after;
      } else if (toks_[i].is(".") && is_ident(toks_[i + 1])) {
        i += 2;
      } else if (toks_[i].is("[") && toks_[i + 1].is("]")) {
        i += 2;
      } else {
        break;
      }
    }
    if (!is_ident(toks_[i])) return false;
    const Token& after = toks_[i + 1];
    return after.is("=") || after.is(";") || after.is(",") || after.is("[") || after.is(":");
  }

  Node parse_local_class() {
    Node n = begin(NodeKind::LocalClass);
    std::size_t start = pos_;
    std::vector<Annotation> annotations;
    std::vector<std::string> modifiers;
    parse_modifiers(annotations, modifiers);
    TypeDecl local = parse_type_decl(std::move(annotations), std::move(modifiers), start, "");
    collect_bodies(local, n.children);
    return finish(std::move(n));
  }

  static void collect_bodies(TypeDecl& type, std::vector<Node>& out) {
    for (auto& m : type.methods)
      if (m.body) out.push_back(std::move(*m.body));
    for (auto& b : type.initializers) out.push_back(std::move(b));
    for (auto& nested : type.nested) collect_bodies(nested, out);
  }

  bool local_class_ahead() const {
    std::size_t i = pos_;
    while (toks_[i].is("final") || toks_[i].is("abstract") || toks_[i].is("static") ||
           toks_[i].is("sealed") || toks_[i].kind == TokenKind::At) {
      if (toks_[i].kind == TokenKind::At) {
        if (toks_[i + 1].is("interface")) return true;
        ++i;
        while (is_ident(toks_[i]) || toks_[i].is(".")) ++i;
        if (toks_[i].is("(")) {
          int depth = 0;
          for (; toks_[i].kind != TokenKind::End; ++i) {
            if (toks_[i].is("(")) ++depth;
            if (toks_[i].is(")") && --depth == 0) break;
          }
          ++i;
        }
      } else {
        ++i;
      }
    }
    const Token& t = toks_[i];
    if (t.is("class") || t.is("interface") || t.is("enum")) return true;
    return t.is("record") && is_ident(toks_[i + 1]) &&
           (toks_[i + 2].is("(") || toks_[i + 2].is("<"));
  }

  Node parse_statement() {
    const Token& t = cur();
    if (t.is("{")) return parse_block();
    if (t.is(";")) {
      Node n = begin(NodeKind::Empty);
      advance();
      return finish(std::move(n));
    }
    if (t.is("if")) {
      Node n = begin(NodeKind::If);
      advance();
      n.children.push_back(paren_condition());
      n.children.push_back(parse_statement());
      if (accept("else")) n.children.push_back(parse_statement());
      return finish(std::move(n));
    }
    if (t.is("for")) return parse_for();
    if (t.is("while")) {
      Node n = begin(NodeKind::While);
      advance();
      n.children.push_back(paren_condition());
      n.children.push_back(parse_statement());
      return finish(std::move(n));
    }
    if (t.is("do")) {
      Node n = begin(NodeKind::DoWhile);
      advance();
      n.children.push_back(parse_statement());
      expect("while");
      n.children.push_back(paren_condition());
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("switch")) {
      Node n = parse_switch();
      accept(";");
      return n;
    }
    if (t.is("try")) return parse_try();
    if (t.is("return") || t.is("throw")) {
      Node n = begin(t.is("return") ? NodeKind::Return : NodeKind::Throw);
      advance();
      if (!at(";")) n.children.push_back(scan_expression({";"}));
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("break") || t.is("continue")) {
      Node n = begin(t.is("break") ? NodeKind::Break : NodeKind::Continue);
      advance();
      if (is_ident(cur())) advance();
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("assert")) {
      Node n = begin(NodeKind::Assert);
      advance();
      n.children.push_back(scan_expression({";"}));
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("synchronized")) {
      Node n = begin(NodeKind::Synchronized);
      advance();
      n.children.push_back(paren_condition());
      n.children.push_back(parse_block());
      return finish(std::move(n));
    }
    if (t.is("yield") && !(peek().is("=") || peek().is(".") || peek().is("(") ||
                           peek().is("[") || peek().is("++") || peek().is("--"))) {
      Node n = begin(NodeKind::Yield);
      advance();
      n.children.push_back(scan_expression({";"}));
      expect(";");
      return finish(std::move(n));
    }
    if (is_ident(t) && peek().is(":") ) {
      Node n = begin(NodeKind::Labeled);
      advance();
      advance();
      n.children.push_back(parse_statement());
      return finish(std::move(n));
    }
    if (local_class_ahead()) return parse_local_class();

    bool local = looks_like_local_var();
    Node expr = scan_expression({";"});
    expect(";");
    expr.kind = local ? NodeKind::LocalVar : NodeKind::Expression;
    expr.tokens.end = pos_;
    return expr;
  }

  Node parse_for() {
    Node n = begin(NodeKind::For);
    expect("for");
    if (!at("(")) fail("expected '('");
    // A for-each header has no ';' at parenthesis depth 1.
    bool classic = false;
    {
      int depth = 0;
      for (std::size_t i = pos_; toks_[i].kind != TokenKind::End; ++i) {
        const Token& k = toks_[i];
        if (k.is("(") || k.is("[") || k.is("{")) ++depth;
        if (k.is(")") || k.is("]") || k.is("}")) {
          if (--depth == 0) break;
        }
        if (depth == 1 && k.is(";")) {
          classic = true;
          break;
        }
      }
    }
    expect("(");
    if (classic) {
      n.children.push_back(scan_expression({";"}));
      expect(";");
      n.children.push_back(scan_expression({";"}));
      expect(";");
      n.children.push_back(scan_expression({")"}));
      expect(")");
    } else {
      n.kind = NodeKind::ForEach;
      scan_expression({":"});
      expect(":");
      n.children.push_back(scan_expression({")"}));
      expect(")");
    }
    n.children.push_back(parse_statement());
    return finish(std::move(n));
  }

  Node parse_try() {
    Node n = begin(NodeKind::Try);
    expect("try");
    if (at("(")) {
      advance();
      n.children.push_back(scan_expression({")"}));
      expect(")");
    }
    n.children.push_back(parse_block());
    while (at("catch")) {
      Node c = begin(NodeKind::Catch);
      advance();
      skip_balanced("(", ")");
      c.children.push_back(parse_block());
      n.children.push_back(finish(std::move(c)));
    }
    if (at("finally")) {
      Node f = begin(NodeKind::Finally);
      advance();
      f.children.push_back(parse_block());
      n.children.push_back(finish(std::move(f)));
    }
    return finish(std::move(n));
  }

  Node parse_switch() {
    Node n = begin(NodeKind::Switch);
    expect("switch");
    n.children.push_back(paren_condition());
    expect("{");
    while (!at("}")) {
      if (cur().kind == TokenKind::End) fail("unterminated switch");
      if (at("case")) {
        Node label = begin(NodeKind::CaseLabel);
        advance();
        Node constants = scan_expression({":", "->"});
        label.ternary_count = constants.ternary_count;
        label.short_circuit_count = constants.short_circuit_count;
        label.children = std::move(constants.children);
        if (!accept(":")) expect("->");
        n.children.push_back(finish(std::move(label)));
      } else if (at("default") && (peek().is(":") || peek().is("->"))) {
        advance();
        advance();
      } else {
        n.children.push_back(parse_statement());
      }
    }
    expect("}");
    return finish(std::move(n));
  }

  // ---- expressions -------------------------------------------------------

  // Walks an expression up to (not including) a terminator at bracket depth
  // zero. Nested bodies become children so that statements inside lambdas,
  // anonymous classes and switch expressions stay visible to tree walks.
  Node scan_expression(std::initializer_list<std::string_view> terminators) {
    Node e = begin(NodeKind::Expression);
    int depth = 0;
    std::vector<int> pending_new;  // bracket depths at which a 'new' is open
    auto is_terminator = [&](const Token& t) {
      if (t.kind == TokenKind::StringLiteral || t.kind == TokenKind::CharLiteral ||
          t.kind == TokenKind::TextBlock)
        return false;
      return std::find(terminators.begin(), terminators.end(), t.text) != terminators.end();
    };
    while (true) {
      const Token& t = cur();
      if (t.kind == TokenKind::End) fail("unterminated expression");
      if (depth == 0 && is_terminator(t)) break;
      if (t.is("(") || t.is("[")) {
        ++depth;
        advance();
      } else if (t.is(")") || t.is("]") || t.is("}")) {
        if (depth == 0) fail("unbalanced '" + t.text + "'");
        --depth;
        advance();
      } else if (t.is("{")) {
        const Token& prev = toks_[pos_ - 1];
        if (prev.is("->")) {
          Node lambda = begin(NodeKind::Lambda);
          lambda.children.push_back(parse_block());
          e.children.push_back(finish(std::move(lambda)));
        } else if (prev.is(")") && !pending_new.empty() && pending_new.back() == depth) {
          pending_new.pop_back();
          Node anon = begin(NodeKind::AnonymousClass);
          TypeDecl body;
          parse_class_body(body);
          collect_bodies(body, anon.children);
          e.children.push_back(finish(std::move(anon)));
        } else {
          ++depth;  // array initializer
          advance();
        }
      } else if (t.is("switch")) {
        e.children.push_back(parse_switch());
      } else if (t.is("new")) {
        pending_new.push_back(depth);
        advance();
      } else if (t.is("<") && pos_ > 0 &&
                 (is_ident(toks_[pos_ - 1]) || toks_[pos_ - 1].is(".") ||
                  toks_[pos_ - 1].is("new") || toks_[pos_ - 1].is("::"))) {
        std::size_t after = skip_type_arguments(toks_, pos_);
        pos_ = after == pos_ ? pos_ + 1 : after;
      } else if (t.is("?")) {
        ++e.ternary_count;
        advance();
      } else if (t.is("&&") || t.is("||")) {
        ++e.short_circuit_count;
        advance();
      } else {
        if (t.is(";") || t.is(",")) {
          // Separators inside brackets, or a 'new' that never got a body.
          if (!pending_new.empty() && pending_new.back() >= depth) pending_new.pop_back();
        }
        advance();
      }
      while (!pending_new.empty() && pending_new.back() > depth) pending_new.pop_back();
    }
    return finish(std::move(e));
  }

  CompilationUnit& unit_;
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

CompilationUnit parse_compilation_unit(std::string source, std::string path) {
  CompilationUnit unit;
  unit.path = std::move(path);
  unit.source = std::move(source);
  try {
    unit.tokens = tokenize(unit.source);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseFailure, unit.path + ": " + e.what());
  }
  Parser(unit).parse();
  return unit;
}

int count_code_lines(const CompilationUnit& unit, TokenRange range) {
  std::set<int> lines;
  for (std::size_t i = range.begin; i < range.end && i < unit.tokens.size(); ++i) {
    const Token& t = unit.tokens[i];
    if (t.kind == TokenKind::End) continue;
    for (int l = t.line; l <= t.end_line; ++l) lines.insert(l);
  }
  return static_cast<int>(lines.size());
}

}  // namespace stubforge::java
