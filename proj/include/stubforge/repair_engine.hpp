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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/extractor.hpp"
#include "stubforge/llm_gateway.hpp"
#include "stubforge/promptkit.hpp"
#include "stubforge/scanner.hpp"
#include "stubforge/toolchain.hpp"

namespace stubforge {

/// Independent repair budgets. A limit of n allows n + 1 attempts.
struct RetryLimits {
  int compile = 5;
  int runtime = 5;
};

enum class CompileOutcome { CompiledFirstTry, CompiledAfterRepairs, NeverCompiled };
enum class ExecutionOutcome { AllPassed, SomeFailedFinal };
std::string_view to_string(CompileOutcome o);
std::string_view to_string(ExecutionOutcome o);

struct Outcome {
  CompileOutcome compile = CompileOutcome::NeverCompiled;
  int repairs = 0;  // compile repairs before the first success
  std::optional<ExecutionOutcome> execution;
  int tests_executed = 0;
  int tests_passed = 0;

  /// "CompiledAfterRepairs(2), AllPassed"
  std::string describe() const;
  bool operator==(const Outcome&) const = default;
};

/// The generate/compile/execute state machine. Transitions throw
/// ContractBreach when they would break an attempt bound or leave Done.
class RepairState {
 public:
  explicit RepairState(RetryLimits limits = {});

  enum class Phase { Generated, Compiling, CompileRepairing, Executing, RuntimeRepairing, Done };

  void begin_compile();
  void compile_failed();  // to CompileRepairing(k) or Done when out of budget
  void compile_succeeded();
  /// From Compiling after a success, or from RuntimeRepairing.
  void begin_execution();
  void run_failed();      // to RuntimeRepairing(k) or Done when out of budget
  void run_passed();
  /// Stops from any phase, e.g. after a dependency error.
  void abort();

  Phase phase() const { return phase_; }
  int repair_round() const { return k_; }
  int compile_attempts() const { return compile_attempts_; }
  int runtime_attempts() const { return runtime_attempts_; }
  bool compiled() const { return compiled_; }
  bool terminal() const { return phase_ == Phase::Done; }
  const RetryLimits& limits() const { return limits_; }
  /// Phases visited, e.g. {"Generated", "Compiling", "CompileRepairing(1)", ...}.
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  void enter(Phase p, int k = 0);
  void require_live() const;

  RetryLimits limits_;
  Phase phase_ = Phase::Generated;
  int k_ = 0;
  int compile_attempts_ = 0;
  int runtime_attempts_ = 0;
  int first_success_ = 0;
  bool compiled_ = false;
  std::vector<std::string> trace_;

  friend Outcome classify_outcome(const RepairState&, const std::optional<TestRunResult>&);
};

/// Throws ContractBreach on a non-terminal state, or on run facts that
/// contradict it (a run for a suite that never compiled).
Outcome classify_outcome(const RepairState& state, const std::optional<TestRunResult>& run);

/// One tool step of the pipeline, persisted under run_dir/<cut>/<index>/.
struct AttemptRecord {
  int index = 0;
  std::string phase;  // "compile", "run", "recompile"
  bool success = false;
  std::string detail;  // diagnostics or failure logs fed to the next repair
};

struct CutRunResult {
  std::string cut_id;
  std::string mode;  // "mock_informed" or "baseline"
  Outcome outcome;
  int compile_attempts = 0;
  int runtime_attempts = 0;
  int llm_calls = 0;
  int tests_generated = 0;  // test methods in the last candidate file
  std::optional<CandidateTestFile> final_test_file;
  std::vector<LedgerEntry> ledger_slice;
  std::optional<CoverageReport> coverage;
  std::optional<MutationReport> mutation;
  std::vector<std::string> trace;
  std::vector<AttemptRecord> attempts;
  std::vector<std::string> warnings;
  std::optional<std::string> error;  // dependency failure that ended the run early

  bool compiled() const { return outcome.compile != CompileOutcome::NeverCompiled; }
};

nlohmann::ordered_json to_json(const CutRunResult& r);
/// Throws MalformedReport.
CutRunResult cut_run_result_from_json(const nlohmann::json& j);

struct PipelineDeps {
  const PromptKit& promptkit;
  LlmGateway& gateway;
  const ModelConfig& model;
  Toolchain& toolchain;
  RetryPolicy retry{};
};

struct PipelineOptions {
  RetryLimits limits;
  std::size_t token_budget = 32000;
  std::filesystem::path run_dir;  // empty: no artifacts written
  std::string run_id = "run";
  std::string cut_key;            // ledger and directory key; defaults to the qualified name
  std::filesystem::path workspace;
  bool analyze = true;            // coverage and mutation for a passing final suite
};

/// Generate, compile-repair, execute-repair, classify. Errors before the
/// first completion propagate; later dependency errors end the run with a
/// classified result whose `error` is set.
CutRunResult run_pipeline(const CutProfile& cut, const MockExtract* mocks, PipelineDeps deps,
                          const PipelineOptions& options);

struct BatchJob {
  CutProfile cut;
  std::optional<MockExtract> mocks;
  std::string cut_key;  // empty: the qualified name
};

using ToolchainFactory = std::function<std::unique_ptr<Toolchain>(const BatchJob&, const std::filesystem::path& workspace)>;

struct BatchOptions {
  PipelineOptions pipeline;    // run_dir, run_id and limits shared by every job
  RetryPolicy retry;
  int parallelism = 1;
  /// A job that throws gets a NeverCompiled result carrying the error
  /// (written to its result.json) instead of failing the batch.
  bool isolate_failures = false;
  /// Each job gets <root>/<cut_key>; defaults to <run_dir>/workspaces.
  std::filesystem::path workspace_root;
};

/// Runs the jobs on up to `parallelism` threads, one workspace and one
/// toolchain per job. Results keep job order. Unless failures are isolated,
/// a job whose pipeline throws rethrows after all jobs finish (the lowest
/// index wins).
std::vector<CutRunResult> run_batch(const std::vector<BatchJob>& jobs, const PromptKit& promptkit,
                                    LlmGateway& gateway, const ModelConfig& model, const ToolchainFactory& toolchains,
                                    WorkspaceRegistry& registry, const BatchOptions& options);

/// Directory-safe form of a key.
std::string path_key(std::string_view key);

}  // namespace stubforge
