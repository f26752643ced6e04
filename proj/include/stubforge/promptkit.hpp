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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stubforge/error.hpp"
#include "stubforge/extractor.hpp"
#include "stubforge/scanner.hpp"

namespace stubforge {

/// Character-count token estimate, rounded up.
struct TokenEstimator {
  double chars_per_token = 4.0;

  std::size_t estimate(std::string_view text) const;
};

struct PromptSection {
  std::string label;
  std::string body;

  bool operator==(const PromptSection&) const = default;
};

struct PromptBundle {
  std::string system_text;
  std::vector<PromptSection> sections;
  std::size_t estimated_tokens = 0;
  // Kept so that mock_data can be re-rendered with fewer entries.
  std::optional<MockExtract> mocks;
  std::vector<std::string> truncations;

  const PromptSection* section(std::string_view label) const;
  bool has(std::string_view label) const { return section(label) != nullptr; }

  /// Sections joined by blank lines; this is the user message.
  std::string render_user() const;
  /// System text followed by the user message; hashed, logged and estimated.
  std::string render() const;

  bool operator==(const PromptBundle&) const = default;
};

struct FewShotExample {
  std::string name;
  std::string subject_source;
  std::string mock_json;
  std::string expected_tests;
};

struct CandidateTestFile {
  std::string file_name;  // relative to the test source root
  std::string text;
  std::string declared_package;
  int import_count = 0;
  int test_method_count = 0;

  bool operator==(const CandidateTestFile&) const = default;
};

/// A template file split into `@@name` blocks. Blocks may hold
/// `{{#clause id}}...{{/clause}}` markers and `{{var}}` placeholders.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string_view text, std::string name = "template");
  static PromptTemplate load(const std::filesystem::path& path);

  bool has_block(std::string_view block) const;
  /// Text of clause `id` inside `block`, markers stripped; nullopt if absent.
  std::optional<std::string> clause(std::string_view block, std::string_view id) const;
  /// Block with markers removed and placeholders substituted. An unknown
  /// placeholder raises TemplateInvalid.
  std::string render(std::string_view block, const std::map<std::string, std::string>& vars) const;

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::map<std::string, std::string, std::less<>> blocks_;
};

/// Clause ids and the phrase each must contain, case-insensitively.
struct RequiredClause {
  std::string_view id;
  std::string_view phrase;
};
extern const std::vector<RequiredClause> kGenerationClauses;
extern const std::vector<RequiredClause> kRepairClauses;
extern const RequiredClause kEscalationClause;

/// Throws TemplateInvalid when a required block or clause is missing.
void validate_generation_template(const PromptTemplate& t);
void validate_repair_template(const PromptTemplate& t);

FewShotExample load_fewshot(const std::filesystem::path& dir);

enum class RepairPhase { Compile, Runtime };

class PromptKit {
 public:
  PromptKit(PromptTemplate generate, PromptTemplate repair, std::vector<FewShotExample> fewshots,
            TokenEstimator estimator = {});

  /// Reads generate.txt, repair.txt and fewshot/{1,2}/ from `dir`.
  static PromptKit load(const std::filesystem::path& dir, TokenEstimator estimator = {});

  /// Mock-informed when `mocks` is given, baseline otherwise. The result is
  /// already fitted to `budget`.
  PromptBundle build_generation_prompt(const CutProfile& cut, const MockExtract* mocks,
                                       std::size_t budget) const;

  /// Drops fewshot_2, then fewshot_1, then mock entries from the tail until
  /// the estimate fits. Throws BudgetImpossible when it cannot.
  PromptBundle enforce_token_budget(PromptBundle bundle, std::size_t budget) const;

  PromptBundle build_repair_prompt(const CutProfile& cut, const CandidateTestFile& test,
                                   std::string_view diagnostics, int attempt_index,
                                   RepairPhase phase = RepairPhase::Compile) const;

  const TokenEstimator& estimator() const { return estimator_; }
  const std::vector<FewShotExample>& fewshots() const { return fewshots_; }

 private:
  void refresh(PromptBundle& bundle) const;

  PromptTemplate generate_;
  PromptTemplate repair_;
  std::vector<FewShotExample> fewshots_;
  TokenEstimator estimator_;
};

/// Outcome of reading a model reply. `text` is the extracted code even when
/// `error` is set, so a NoPackage reply can still be sent back for repair.
struct LlmParse {
  std::string text;
  std::optional<CandidateTestFile> file;
  std::optional<ErrorCode> error;
  std::string message;
};

/// Never throws.
LlmParse inspect_llm_output(std::string_view raw);

/// Throws NoTestFound or NoPackage.
CandidateTestFile parse_llm_output(std::string_view raw);

/// Writes the rendered bundle to run_dir/prompts/<name>.txt.
std::filesystem::path log_prompt(const std::filesystem::path& run_dir, std::string_view name,
                                 const PromptBundle& bundle);

}  // namespace stubforge
