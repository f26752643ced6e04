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

#include "stubforge/mock_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>
#include <set>

#include "stubforge/java/parser.hpp"
#include "stubforge/scanner.hpp"

namespace stubforge {

using java::CompilationUnit;
using java::Node;
using java::NodeKind;
using java::Token;
using java::TokenKind;
using java::TokenRange;

TypeResolver::TypeResolver(const SourceIndex& index) : index_(index) {
  for (const auto& p : index.production_units) {
    by_simple_name_[std::string(java::simple_name(p.qualified_name))].push_back(p.qualified_name);
  }
}

std::string TypeResolver::resolve(std::string_view written, const CompilationUnit& unit) const {
  std::string name = java::strip_generics(written);
  if (name.empty()) return name;
  if (name.find('.') != std::string::npos) {
    if (index_.find(name)) return name;
    std::string first = name.substr(0, name.find('.'));
    std::string rest = name.substr(name.find('.'));
    for (const auto& imp : unit.imports) {
      if (!imp.is_static && !imp.wildcard && java::simple_name(imp.name) == first)
        return imp.name + rest;
    }
    if (!unit.package_name.empty() && index_.find(unit.package_name + "." + name))
      return unit.package_name + "." + name;
    return name;
  }
  for (const auto& imp : unit.imports) {
    if (!imp.is_static && !imp.wildcard && java::simple_name(imp.name) == name) return imp.name;
  }
  std::string same_package = unit.package_name.empty() ? name : unit.package_name + "." + name;
  if (index_.find(same_package)) return same_package;
  for (const auto& imp : unit.imports) {
    if (imp.wildcard && !imp.is_static && index_.find(imp.name + "." + name))
      return imp.name + "." + name;
  }
  auto it = by_simple_name_.find(name);
  if (it != by_simple_name_.end() && it->second.size() == 1) return it->second.front();
  return name;
}

std::vector<TokenRange> split_arguments(const std::vector<Token>& tokens, TokenRange args) {
  std::vector<TokenRange> out;
  if (args.empty()) return out;
  int depth = 0;
  std::size_t start = args.begin;
  for (std::size_t i = args.begin; i < args.end; ++i) {
    const Token& t = tokens[i];
    if (t.is("(") || t.is("[") || t.is("{")) {
      ++depth;
    } else if (t.is(")") || t.is("]") || t.is("}")) {
      --depth;
    } else if (t.is("<") && i > args.begin &&
               (tokens[i - 1].is(".") ||
                (tokens[i - 1].kind == TokenKind::Identifier &&
                 std::isupper(static_cast<unsigned char>(tokens[i - 1].text[0]))))) {
      std::size_t after = java::skip_type_arguments(tokens, i);
      if (after > i && after <= args.end) i = after - 1;
    } else if (depth == 0 && t.is(",")) {
      out.push_back({start, i});
      start = i + 1;
    }
  }
  out.push_back({start, args.end});
  return out;
}

namespace {

bool has_any_annotation(const std::vector<java::Annotation>& annotations,
                        const std::vector<std::string>& names) {
  return std::any_of(annotations.begin(), annotations.end(), [&](const java::Annotation& a) {
    return std::find(names.begin(), names.end(), a.name) != names.end();
  });
}

bool is_type_like(const Token& t) {
  return t.kind == TokenKind::Identifier || t.is(">") || t.is("]") ||
         (t.kind == TokenKind::Keyword &&
          (t.is("int") || t.is("long") || t.is("boolean") || t.is("double") || t.is("float") ||
           t.is("short") || t.is("byte") || t.is("char")));
}

// Names declared by a local variable statement.
void collect_local_names(const CompilationUnit& unit, const Node& node,
                         std::set<std::string>& names) {
  if (node.kind == NodeKind::LocalVar) {
    const auto& toks = unit.tokens;
    int depth = 0;
    for (std::size_t i = node.tokens.begin; i + 1 < node.tokens.end; ++i) {
      const Token& t = toks[i];
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      if (t.is(")") || t.is("]") || t.is("}")) --depth;
      if (depth == 0 && t.kind == TokenKind::Identifier && i > node.tokens.begin &&
          is_type_like(toks[i - 1]) &&
          (toks[i + 1].is("=") || toks[i + 1].is(";") || toks[i + 1].is(",") ||
           toks[i + 1].is(":"))) {
        names.insert(t.text);
      }
    }
  }
  for (const auto& c : node.children) collect_local_names(unit, c, names);
}

// Statement-level assignments "name = value;" or "this.name = value;".
template <typename Fn>
void for_each_assignment(const CompilationUnit& unit, const Node& node, Fn&& fn) {
  if (node.kind == NodeKind::Expression && node.tokens.size() >= 3) {
    const auto& toks = unit.tokens;
    std::size_t i = node.tokens.begin;
    if (toks[i].is("this") && toks[i + 1].is(".")) i += 2;
    if (i + 1 < node.tokens.end && toks[i].kind == TokenKind::Identifier && toks[i + 1].is("=")) {
      std::size_t value_end = node.tokens.end;
      if (value_end > i + 2 && toks[value_end - 1].is(";")) --value_end;
      fn(toks[i].text, TokenRange{i + 2, value_end}, toks[node.tokens.begin].line);
    }
  }
  for (const auto& c : node.children) for_each_assignment(unit, c, fn);
}

class UnitAnalyzer {
 public:
  UnitAnalyzer(const CompilationUnit& unit, const MockingDialect& dialect,
               const TypeResolver& resolver, const ScanConfig& config)
      : unit_(unit), toks_(unit.tokens), dialect_(dialect), resolver_(resolver), config_(config) {}

  TestUnitAnalysis run() {
    TestUnitAnalysis out;
    out.unit = &unit_;
    for (const auto& type : unit_.types) analyze_type(type, {}, {}, out);
    auto by_position = [](const auto& a, const auto& b) {
      return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    };
    std::stable_sort(out.operations.begin(), out.operations.end(), by_position);
    std::stable_sort(out.field_assignments.begin(), out.field_assignments.end(),
                     [](const auto& a, const auto& b) { return a.line < b.line; });
    return out;
  }

 private:
  using TypeMap = std::map<std::string, std::string>;

  // Mocked type created by the expression starting at `at`, if any.
  std::optional<std::string> creation_type(std::size_t at) const {
    for (const auto& p : dialect_.creation_calls) {
      if (auto m = dialect_.match_call(p, toks_, at)) {
        return resolver_.resolve(unit_.text(m->captures.at("TYPE")), unit_);
      }
    }
    return std::nullopt;
  }

  void analyze_type(const java::TypeDecl& type, std::set<std::string> fields, TypeMap doubles,
                    TestUnitAnalysis& out) {
    for (const auto& f : type.fields) {
      bool annotated = has_any_annotation(f.annotations, dialect_.creation_annotations);
      for (const auto& d : f.declarators) {
        fields.insert(d.name);
        if (annotated) {
          doubles[d.name] = resolver_.resolve(f.type_text, unit_);
        } else if (!d.initializer.empty()) {
          if (auto t = creation_type(d.initializer.begin)) doubles[d.name] = *t;
        }
        if (!d.initializer.empty()) out.field_assignments.push_back({d.name, d.initializer, "", d.line});
      }
    }
    // Assignments of doubles to fields from any method or initializer.
    auto scan_field_doubles = [&](const Node& body) {
      std::set<std::string> locals;
      collect_local_names(unit_, body, locals);
      for_each_assignment(unit_, body, [&](const std::string& name, TokenRange value, int) {
        if (!fields.count(name) || locals.count(name)) return;
        if (auto t = creation_type(value.begin)) doubles[name] = *t;
      });
    };
    for (const auto& m : type.methods)
      if (m.body) scan_field_doubles(*m.body);
    for (const auto& b : type.initializers) scan_field_doubles(b);

    for (const auto& m : type.methods) {
      if (!m.body) continue;
      bool is_test = has_any_annotation(m.annotations, config_.test_annotations);
      bool is_setup = has_any_annotation(m.annotations, config_.setup_annotations);
      if (!is_test && !is_setup) continue;
      std::string test_id = type.qualified_name + "#" + m.name;
      TypeMap scope = doubles;
      for (const auto& p : m.parameters) {
        if (has_any_annotation(p.annotations, dialect_.creation_annotations))
          scope[p.name] = resolver_.resolve(p.type_text, unit_);
      }
      std::set<std::string> locals;
      collect_local_names(unit_, *m.body, locals);
      for (const auto& p : m.parameters) locals.insert(p.name);
      for_each_assignment(unit_, *m.body, [&](const std::string& name, TokenRange value, int line) {
        if (fields.count(name) && !locals.count(name))
          out.field_assignments.push_back({name, value, test_id, line});
      });
      // Local doubles: "T x = mock(T.class)" and "x = mock(T.class)".
      const TokenRange body = m.body->tokens;
      for (std::size_t i = body.begin; i < body.end; ++i) {
        if (i < body.begin + 2 || !toks_[i - 1].is("=")) continue;
        if (toks_[i - 2].kind != TokenKind::Identifier) continue;
        if (auto t = creation_type(i)) scope[toks_[i - 2].text] = *t;
      }
      scan_operations(body, test_id, is_setup && !is_test, scope, out);
    }
    for (const auto& nested : type.nested) analyze_type(nested, fields, doubles, out);
  }

  std::vector<TokenRange> args_of(const TokenPattern::Match& m) const {
    auto it = m.captures.find("ARGS");
    return it == m.captures.end() ? std::vector<TokenRange>{} : split_arguments(toks_, it->second);
  }

  bool fill_target(MockOperation& op, const TokenPattern::Match& m, const TypeMap& scope) const {
    auto mock = m.captures.find("MOCK");
    auto method = m.captures.find("METHOD");
    if (mock == m.captures.end() || method == m.captures.end()) return false;
    op.mock_variable = toks_[mock->second.begin].text;
    auto it = scope.find(op.mock_variable);
    if (it == scope.end()) return false;
    op.mocked_type = it->second;
    op.method = toks_[method->second.begin].text;
    auto args = m.captures.find("ARGS");
    if (args != m.captures.end()) op.arguments = args->second;
    op.argument_list = args_of(m);
    return true;
  }

  RecognizedAction make_action(const ActionPattern& a, const TokenPattern::Match& m,
                               std::size_t start) const {
    RecognizedAction act;
    act.kind = a.kind;
    act.link = {start, m.end};
    auto v = m.captures.find("VALUE");
    if (v != m.captures.end()) act.value = v->second;
    return act;
  }

  std::optional<MockOperation> match_stubbing(const StubbingPattern& sp, std::size_t i,
                                              const TypeMap& scope) const {
    MockOperation op;
    op.kind = MockOpKind::Stubbing;
    if (sp.order == StubbingPattern::Order::TriggerFirst) {
      auto m = dialect_.match_call(sp.trigger, toks_, i);
      if (!m) return std::nullopt;
      if (!fill_target(op, *m, scope)) return std::nullopt;
      std::size_t k = m->end;
      while (k + 1 < toks_.size() && toks_[k].is(".")) {
        bool linked = false;
        for (const auto& a : sp.actions) {
          if (auto am = a.pattern.match(toks_, k + 1)) {
            op.actions.push_back(make_action(a, *am, k + 1));
            k = am->end;
            linked = true;
            break;
          }
        }
        if (!linked) break;
      }
      if (op.actions.empty()) return std::nullopt;
      op.span = {i, k};
      return op;
    }
    // Action-first: action (. action)* . trigger
    std::size_t k = i;
    bool first = true;
    while (true) {
      bool linked = false;
      for (const auto& a : sp.actions) {
        auto am = first ? dialect_.match_call(a.pattern, toks_, k) : a.pattern.match(toks_, k);
        if (am) {
          std::size_t link_start = first ? k + dialect_.qualifier_length(toks_, k) : k;
          op.actions.push_back(make_action(a, *am, link_start));
          k = am->end;
          linked = true;
          break;
        }
      }
      if (!linked) break;
      first = false;
      if (k + 1 >= toks_.size() || !toks_[k].is(".")) return std::nullopt;
      if (auto tm = sp.trigger.match(toks_, k + 1)) {
        if (!fill_target(op, *tm, scope)) return std::nullopt;
        op.span = {i, tm->end};
        return op;
      }
      ++k;
    }
    return std::nullopt;
  }

  RecognizedCardinality match_cardinality(TokenRange range) const {
    RecognizedCardinality c;
    for (const auto& cp : dialect_.cardinalities) {
      std::size_t start = range.begin + dialect_.qualifier_length(toks_, range.begin);
      auto m = cp.pattern.match(toks_, start);
      if (!m || m->end != range.end) continue;
      c.kind = cp.kind;
      c.count = cp.fixed_count;
      auto n = m->captures.find("N");
      if (n != m->captures.end()) {
        std::string digits;
        for (char ch : toks_[n->second.begin].text)
          if (std::isdigit(static_cast<unsigned char>(ch))) digits.push_back(ch);
        c.count = std::stoll(digits.empty() ? "0" : digits);
      }
      return c;
    }
    return c;
  }

  std::optional<MockOperation> match_verify(const VerifyPattern& vp, std::size_t i,
                                            const TypeMap& scope) const {
    auto m = dialect_.match_call(vp.pattern, toks_, i);
    if (!m) return std::nullopt;
    MockOperation op;
    op.kind = MockOpKind::Verify;
    if (!fill_target(op, *m, scope)) return std::nullopt;
    auto card = m->captures.find("CARDINALITY");
    if (card != m->captures.end()) op.cardinality = match_cardinality(card->second);
    op.span = {i, m->end};
    return op;
  }

  void scan_operations(TokenRange body, const std::string& test_id, bool in_setup,
                       const TypeMap& scope, TestUnitAnalysis& out) const {
    for (std::size_t i = body.begin; i < body.end; ++i) {
      std::optional<MockOperation> found;
      for (const auto& sp : dialect_.stubbings) {
        if ((found = match_stubbing(sp, i, scope))) break;
      }
      if (!found) {
        for (const auto& vp : dialect_.verifications) {
          if ((found = match_verify(vp, i, scope))) break;
        }
      }
      if (!found) continue;
      found->test_id = test_id;
      found->in_setup = in_setup;
      found->line = toks_[i].line;
      found->column = toks_[i].column;
      i = found->span.end - 1;
      out.operations.push_back(std::move(*found));
    }
  }

  const CompilationUnit& unit_;
  const std::vector<Token>& toks_;
  const MockingDialect& dialect_;
  const TypeResolver& resolver_;
  const ScanConfig& config_;
};

}  // namespace

TestUnitAnalysis analyze_test_unit(const CompilationUnit& unit, const MockingDialect& dialect,
                                   const TypeResolver& resolver, const ScanConfig& config) {
  return UnitAnalyzer(unit, dialect, resolver, config).run();
}

}  // namespace stubforge
