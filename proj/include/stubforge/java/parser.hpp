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

#include <string>
#include <string_view>

#include "stubforge/java/ast.hpp"

namespace stubforge::java {

/// Parses a whole Java source file into declarations and statement trees.
/// Throws Error(ParseFailure) with the offending line on malformed input.
CompilationUnit parse_compilation_unit(std::string source, std::string path);

/// Number of distinct lines within `range` that carry at least one token.
/// Blank and comment-only lines never count; a multi-line text block counts
/// every line it spans.
int count_code_lines(const CompilationUnit& unit, TokenRange range);

/// Index just past the '>' closing the type-argument list that opens at
/// `open`, or `open` itself when the tokens there are not type arguments
/// (e.g. a less-than comparison).
std::size_t skip_type_arguments(const std::vector<Token>& tokens, std::size_t open);

}  // namespace stubforge::java
