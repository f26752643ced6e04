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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/dialect.hpp"
#include "stubforge/java/ast.hpp"
#include "stubforge/parallel.hpp"

namespace stubforge {

struct ScanConfig {
  std::vector<std::string> test_roots{"src/test/java"};
  std::vector<std::string> test_annotations{"Test", "ParameterizedTest", "RepeatedTest",
                                            "TestFactory", "TestTemplate"};
  std::vector<std::string> setup_annotations{"BeforeEach", "BeforeAll", "Before", "BeforeClass"};
  std::vector<std::string> excluded_dirs{".git", ".gradle", ".idea", "build", "node_modules",
                                         "out", "target"};
  Execution execution = Execution::Parallel;
};

struct MethodSummary {
  std::string name;
  int parameter_arity = 0;
  int cyclomatic_complexity = 1;
  int start_line = 0;
  int end_line = 0;
};

struct ProductionUnit {
  std::string qualified_name;
  std::string path;  // project-relative
  int loc = 0;
  std::vector<MethodSummary> methods;  // constructors excluded
  std::vector<std::string> supertypes;
  std::shared_ptr<const java::CompilationUnit> tree;

  bool declares(std::string_view method) const;
};

struct TestUnit {
  std::string path;
  std::shared_ptr<const java::CompilationUnit> tree;
};

struct SourceIndex {
  std::filesystem::path root;
  std::vector<ProductionUnit> production_units;  // sorted by (path, qualified_name)
  std::vector<TestUnit> test_units;              // sorted by path
  std::vector<std::string> warnings;

  const ProductionUnit* find(std::string_view qualified_name) const;
};

struct CandidateTarget {
  std::string qualified_name;
  std::vector<std::string> mocked_in_tests;  // test ids "pkg.Class#method", sorted
  int stubbing_count = 0;
  int verify_count = 0;
  bool project_owned = false;

  bool operator==(const CandidateTarget&) const = default;
};

struct CutCriteria {
  int loc = 50;
  int methods = 5;
  int cc = 5;
};

struct CutProfile {
  CandidateTarget target;
  std::string source_path;
  int loc = 0;
  int method_count = 0;
  int max_cc = 1;
  std::string source_text;
};

/// Walks `root`, parses every .java file, and partitions them into test and
/// production units. Files under a configured test root, or declaring a
/// method with a test annotation, are test units. Unparseable files become
/// warnings. Throws RootNotFound or NoTestFiles.
SourceIndex discover_test_files(const std::filesystem::path& root, const ScanConfig& config);

/// One candidate per mocked type with at least one stubbing or verify
/// operation in a test or setup method, sorted by qualified name.
std::vector<CandidateTarget> identify_mocked_targets(const SourceIndex& index,
                                                     const MockingDialect& dialect,
                                                     const ScanConfig& config = {});

/// Keeps candidates whose type is declared in the project's own sources.
std::vector<CandidateTarget> filter_project_owned(std::vector<CandidateTarget> candidates,
                                                  const SourceIndex& index);

/// 1 + decision points: if, loops, case labels, catch clauses, conditional
/// expressions and short-circuit operators, counted over the statement tree.
int compute_cyclomatic_complexity(const java::Node& method_body);

bool meets_criteria(int loc, int methods, int max_cc, int stubbings, int verifies,
                    const CutCriteria& criteria);

std::vector<CutProfile> select_cuts(const std::vector<CandidateTarget>& candidates,
                                    const SourceIndex& index, const CutCriteria& criteria = {});

/// Builds the profile for one project-owned candidate without applying the
/// thresholds. Returns nullopt when the type is not in the index.
std::optional<CutProfile> profile_candidate(const CandidateTarget& candidate,
                                            const SourceIndex& index);

nlohmann::ordered_json to_json(const CandidateTarget& target);
CandidateTarget candidate_from_json(const nlohmann::json& j);

/// `targets.json` bytes: UTF-8, fixed key order, trailing newline.
std::string serialize_targets(const std::vector<CandidateTarget>& targets);
std::vector<CandidateTarget> parse_targets(std::string_view json_text);

}  // namespace stubforge
