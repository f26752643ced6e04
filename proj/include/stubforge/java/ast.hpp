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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stubforge/java/lexer.hpp"

namespace stubforge::java {

/// Half-open range of token indices into CompilationUnit::tokens.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool empty() const { return begin >= end; }
  std::size_t size() const { return empty() ? 0 : end - begin; }
};

enum class NodeKind {
  Block,
  If,
  For,
  ForEach,
  While,
  DoWhile,
  Switch,
  CaseLabel,
  Try,
  Catch,
  Finally,
  Return,
  Throw,
  Yield,
  Break,
  Continue,
  Assert,
  Synchronized,
  Labeled,
  LocalVar,
  Expression,
  Empty,
  LocalClass,
  Lambda,
  AnonymousClass,
};

std::string_view to_string(NodeKind kind);

/// A statement or expression node of a method body.
///
/// Expression nodes keep their tokens and record the operators that matter
/// for control-flow metrics; bodies nested inside expressions (lambda
/// blocks, anonymous classes, switch expressions) become children.
struct Node {
  NodeKind kind = NodeKind::Empty;
  TokenRange tokens;
  int line = 0;
  int ternary_count = 0;       // conditional '?' operators directly in this expression
  int short_circuit_count = 0; // '&&' and '||' directly in this expression
  std::vector<Node> children;
};

struct Annotation {
  std::string name;       // simple name, e.g. "Mock"
  std::string full_name;  // as written, e.g. "org.mockito.Mock"
  TokenRange arguments;   // inside the parentheses, empty when absent
  int line = 0;
};

struct Parameter {
  std::vector<Annotation> annotations;
  std::string type_text;
  std::string name;
  bool varargs = false;
};

struct VariableDeclarator {
  std::string name;
  TokenRange initializer;  // empty when there is none
  int line = 0;
};

struct FieldDecl {
  std::vector<Annotation> annotations;
  std::vector<std::string> modifiers;
  std::string type_text;
  std::vector<VariableDeclarator> declarators;
  TokenRange span;
  int line = 0;
};

struct MethodDecl {
  std::string name;
  bool is_constructor = false;
  std::vector<Annotation> annotations;
  std::vector<std::string> modifiers;
  std::string return_type;
  std::vector<Parameter> parameters;
  std::optional<Node> body;  // Block node; absent for abstract/interface methods
  TokenRange span;
  int start_line = 0;
  int end_line = 0;

  bool has_annotation(std::string_view simple_name) const;
};

enum class TypeKind { Class, Interface, Enum, Record, Annotation };

struct TypeDecl {
  TypeKind kind = TypeKind::Class;
  std::string name;
  std::string qualified_name;  // package + enclosing types, dot separated
  std::vector<Annotation> annotations;
  std::vector<std::string> modifiers;
  std::vector<std::string> extends;     // simple names with generics stripped
  std::vector<std::string> implements;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::vector<Node> initializers;       // instance/static initializer blocks
  std::vector<TypeDecl> nested;
  TokenRange span;
  int start_line = 0;
  int end_line = 0;

  bool has_annotation(std::string_view simple_name) const;
};

struct Import {
  std::string name;  // dotted, without the trailing ".*"
  bool is_static = false;
  bool wildcard = false;
};

/// Parsed Java source file. Owns its text and tokens; AST nodes refer into
/// the token vector by index.
struct CompilationUnit {
  std::string path;  // project-relative, forward slashes
  std::string source;
  std::vector<Token> tokens;
  std::string package_name;
  std::vector<Import> imports;
  std::vector<TypeDecl> types;

  /// Verbatim source text covering a token range.
  std::string_view text(TokenRange range) const;
  const Token& token(std::size_t index) const { return tokens[index]; }
};

/// Depth-first visit over every type declaration including nested ones.
template <typename Fn>
void for_each_type(const std::vector<TypeDecl>& types, Fn&& fn) {
  for (const auto& t : types) {
    fn(t);
    for_each_type(t.nested, fn);
  }
}

/// Removes generic arguments and array brackets: "List<Foo>[]" -> "List".
std::string strip_generics(std::string_view type_text);

/// Last dotted segment: "a.b.C" -> "C".
std::string_view simple_name(std::string_view dotted);

}  // namespace stubforge::java
