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

#include "stubforge/dialect.hpp"
#include "stubforge/mock_analysis.hpp"
#include "stubforge/parallel.hpp"
#include "stubforge/scanner.hpp"

namespace stubforge {

struct SourceLocation {
  std::string file;  // project-relative, forward slashes
  int line = 0;

  bool operator==(const SourceLocation&) const = default;
};

struct ArgumentCapture {
  enum class Kind { Literal, Expression, Matcher };
  Kind kind = Kind::Expression;
  std::string text;                             // verbatim source
  std::optional<std::string> resolved_literal;  // literals only

  bool operator==(const ArgumentCapture&) const = default;
};

struct StubAction {
  ActionKind kind = ActionKind::Return;
  std::string text;  // returned value, thrown expression, or opaque answer text

  bool operator==(const StubAction&) const = default;
};

struct Stubbing {
  std::string test_id;
  std::string method;
  std::vector<ArgumentCapture> arguments;
  StubAction action;
  bool inherited = false;  // method not declared by the target itself
  SourceLocation location;

  bool operator==(const Stubbing&) const = default;
};

struct Cardinality {
  CardinalityKind kind = CardinalityKind::Unspecified;
  std::optional<long long> count;

  bool operator==(const Cardinality&) const = default;
};

struct VerifyOp {
  std::string test_id;
  std::string method;
  std::vector<ArgumentCapture> arguments;
  Cardinality cardinality;
  bool inherited = false;
  SourceLocation location;

  bool operator==(const VerifyOp&) const = default;
};

struct SetupEntry {
  std::string field;
  std::string expression;
  SourceLocation location;

  bool operator==(const SetupEntry&) const = default;
};

struct MockExtract {
  std::string qualified_name;
  std::string source_path;
  std::vector<Stubbing> stubbings;
  std::vector<VerifyOp> verifications;
  std::vector<SetupEntry> setup_context;

  bool operator==(const MockExtract&) const = default;
};

/// Mock operations of every test unit in an index, analysed once and shared
/// by all per-target extractions.
class MockCorpus {
 public:
  MockCorpus(const SourceIndex& index, const MockingDialect& dialect, const ScanConfig& config = {});

  const SourceIndex& index() const { return index_; }
  const MockingDialect& dialect() const { return dialect_; }
  const TypeResolver& resolver() const { return resolver_; }
  const std::vector<TestUnitAnalysis>& analyses() const { return analyses_; }

 private:
  const SourceIndex& index_;
  const MockingDialect& dialect_;
  TypeResolver resolver_;
  std::vector<TestUnitAnalysis> analyses_;
};

/// Every stubbing and verify operation on doubles of the CUT's type, plus
/// the relevant setup context, in canonical order. Throws ExtractionEmpty
/// when nothing is found.
MockExtract extract_mock_info(const CutProfile& cut, const MockCorpus& corpus);
MockExtract extract_mock_info(const CutProfile& cut, const SourceIndex& index,
                              const MockingDialect& dialect);

/// Extracts for several CUTs; results are in input order.
std::vector<MockExtract> extract_all(const std::vector<CutProfile>& cuts, const MockCorpus& corpus,
                                     Execution exec = Execution::Parallel);

/// Field assignments in one test unit whose value creates or mocks the
/// target type, or whose field is later an argument of an operation on the
/// target.
std::vector<SetupEntry> collect_setup_context(const TestUnitAnalysis& analysis,
                                              const CandidateTarget& target,
                                              const MockingDialect& dialect,
                                              const TypeResolver& resolver);
std::vector<SetupEntry> collect_setup_context(const TestUnit& test_unit,
                                              const CandidateTarget& target,
                                              const MockingDialect& dialect,
                                              const SourceIndex& index);

/// Sorts every entry list by (file, line), ties broken by serialized text.
void canonicalize(MockExtract& extract);

/// Throws InvariantViolation naming the first broken rule.
void validate(const MockExtract& extract);

/// Canonical JSON bytes (2-space indent, fixed key order, trailing newline).
std::string serialize_extract(const MockExtract& extract);
MockExtract deserialize_extract(std::string_view json_text);

std::string_view to_string(ArgumentCapture::Kind kind);
std::string_view to_string(ActionKind kind);
std::string_view to_string(CardinalityKind kind);

}  // namespace stubforge
