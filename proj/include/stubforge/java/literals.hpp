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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stubforge/java/ast.hpp"

namespace stubforge::java {

/// Canonical decimal text of an integer literal ("0x1F" -> "31",
/// "1_000L" -> "1000"). Literals without an L suffix wrap to 32 bits the way
/// the compiler reads them ("0xFFFFFFFF" -> "-1").
std::string normalize_integer_literal(std::string_view text);

/// Shortest round-trip decimal text of a floating literal ("2.5e3" -> "2500",
/// "0.1f" -> "0.1").
std::string normalize_float_literal(std::string_view text);

/// Value of a string literal or text block, with escapes interpreted and,
/// for text blocks, incidental indentation removed. UTF-8 output.
std::string unescape_string_literal(std::string_view text);

/// Normalized value of an argument made of one numeric or string literal,
/// optionally preceded by a unary minus; nullopt for anything else.
std::optional<std::string> normalize_literal(const std::vector<Token>& tokens, TokenRange range);

}  // namespace stubforge::java
