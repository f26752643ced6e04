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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stubforge/dialect.hpp"
#include "stubforge/java/ast.hpp"

namespace stubforge {

struct SourceIndex;
struct ScanConfig;

/// Maps a type name as written in a test file to a qualified name, using the
/// file's package and imports and the production index. Name matching only.
class TypeResolver {
 public:
  explicit TypeResolver(const SourceIndex& index);

  std::string resolve(std::string_view written, const java::CompilationUnit& unit) const;

 private:
  const SourceIndex& index_;
  std::map<std::string, std::vector<std::string>, std::less<>> by_simple_name_;
};

enum class MockOpKind { Stubbing, Verify };

struct RecognizedAction {
  ActionKind kind = ActionKind::Return;
  java::TokenRange link;   // whole chained call, e.g. `thenReturn(x)`
  java::TokenRange value;  // inside the parentheses; may be empty
};

struct RecognizedCardinality {
  CardinalityKind kind = CardinalityKind::Unspecified;
  std::optional<long long> count;
};

/// One stubbing or verify operation found in a test or setup method.
struct MockOperation {
  MockOpKind kind = MockOpKind::Stubbing;
  std::string mock_variable;
  std::string mocked_type;  // qualified
  std::string test_id;      // "pkg.TestClass#method"
  bool in_setup = false;
  std::string method;
  java::TokenRange arguments;
  std::vector<java::TokenRange> argument_list;  // split at top-level commas
  std::vector<RecognizedAction> actions;        // stubbings only, in source order
  RecognizedCardinality cardinality;            // verifications only
  java::TokenRange span;                        // whole matched operation
  int line = 0;
  int column = 0;
};

/// An assignment to a field of the test class, from a field initializer or
/// a statement in a test or setup method.
struct FieldAssignment {
  std::string field;
  java::TokenRange value;
  std::string test_id;  // empty for field initializers
  int line = 0;
};

struct TestUnitAnalysis {
  const java::CompilationUnit* unit = nullptr;
  std::vector<MockOperation> operations;            // source order
  std::vector<FieldAssignment> field_assignments;   // source order
};

TestUnitAnalysis analyze_test_unit(const java::CompilationUnit& unit, const MockingDialect& dialect,
                                   const TypeResolver& resolver, const ScanConfig& config);

/// Splits the tokens of an argument list at commas outside any brackets or
/// type-argument lists.
std::vector<java::TokenRange> split_arguments(const std::vector<java::Token>& tokens,
                                              java::TokenRange args);

}  // namespace stubforge
