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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stubforge/java/ast.hpp"

namespace stubforge {

/// A compiled token pattern such as "when ( $MOCK . $METHOD ( $ARGS ) )".
///
/// Elements are separated by whitespace. Placeholders start with '$':
///   $MOCK    a variable name, optionally written as `this.name`
///   $METHOD  a single identifier
///   $TYPE    a dotted name
///   $N       an integer literal
///   $<other> a balanced token span running up to the next literal element
class TokenPattern {
 public:
  struct Element {
    bool placeholder = false;
    std::string text;  // literal token text or placeholder name without '$'
  };

  struct Match {
    std::size_t end = 0;  // index just past the last matched token
    std::map<std::string, java::TokenRange> captures;
  };

  TokenPattern() = default;
  /// Throws Error(ConfigError) for an empty pattern or a span placeholder
  /// that is not followed by a literal.
  explicit TokenPattern(std::string_view source);

  std::optional<Match> match(const std::vector<java::Token>& tokens, std::size_t at) const;

  const std::string& source() const { return source_; }
  const std::vector<Element>& elements() const { return elements_; }

 private:
  std::string source_;
  std::vector<Element> elements_;
};

enum class ActionKind { Return, Throw, Answer };

struct ActionPattern {
  TokenPattern pattern;
  ActionKind kind = ActionKind::Return;
};

/// Trigger-first forms chain actions after the trigger
/// (`when(m.f()).thenReturn(x)`); action-first forms put the actions before it
/// (`doReturn(x).when(m).f()`). Chained links are joined by '.'.
struct StubbingPattern {
  enum class Order { TriggerFirst, ActionFirst };
  Order order = Order::TriggerFirst;
  TokenPattern trigger;
  std::vector<ActionPattern> actions;
};

enum class CardinalityKind { Unspecified, Times, Never, AtLeast };

struct CardinalityPattern {
  TokenPattern pattern;
  CardinalityKind kind = CardinalityKind::Unspecified;
  std::optional<long long> fixed_count;  // used when the pattern has no $N
};

struct VerifyPattern {
  TokenPattern pattern;  // $CARDINALITY, when present, is matched against cardinality patterns
};

/// The recognizable API surface of a mocking framework, loaded from a data
/// file. Nothing here is framework-specific code.
struct MockingDialect {
  std::string name;
  std::vector<std::string> qualifiers;       // receivers of qualified calls, e.g. "Mockito"
  std::vector<TokenPattern> creation_calls;  // must capture $TYPE
  std::vector<std::string> creation_annotations;
  std::vector<StubbingPattern> stubbings;
  std::vector<VerifyPattern> verifications;
  std::vector<CardinalityPattern> cardinalities;
  std::vector<std::string> matchers;         // argument-matcher function names

  /// Matches `pattern` at `at`, also accepting a leading "Qualifier." prefix.
  /// The token before the match (or before the qualifier) must not be '.',
  /// so member calls such as `x.when(...)` are never taken for the API.
  std::optional<TokenPattern::Match> match_call(const TokenPattern& pattern,
                                                const std::vector<java::Token>& tokens,
                                                std::size_t at) const;

  /// Length of a qualifier prefix ("Mockito ." or "org . mockito . Mockito .")
  /// starting at `at`, or 0.
  std::size_t qualifier_length(const std::vector<java::Token>& tokens, std::size_t at) const;

  bool is_matcher_call(const std::vector<java::Token>& tokens, java::TokenRange arg) const;
};

MockingDialect load_dialect(const std::filesystem::path& path);
MockingDialect parse_dialect(std::string_view json_text);

}  // namespace stubforge
