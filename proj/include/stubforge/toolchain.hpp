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

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/promptkit.hpp"

namespace stubforge {

struct Diagnostic {
  std::string file;
  int line = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

struct CompileResult {
  bool success = false;
  std::vector<Diagnostic> diagnostics;
  std::string raw_log;

  bool operator==(const CompileResult&) const = default;
};

struct TestRunResult {
  int executed = 0;
  int passed = 0;
  int failed = 0;
  std::string failure_logs;
  std::string raw_log;

  bool operator==(const TestRunResult&) const = default;
};

struct CoverageReport {
  std::string cut_id;
  std::set<int> covered_lines;
  std::set<int> coverable_lines;

  double ratio() const;
};

enum class MutantStatus { Killed, Survived, NoCoverage, TimedOut };
std::string_view to_string(MutantStatus s);

struct Mutant {
  std::string id;
  std::string mutator;
  int line = 0;
  MutantStatus status = MutantStatus::Survived;

  bool operator==(const Mutant&) const = default;
};

struct MutationReport {
  std::string cut_id;
  std::vector<Mutant> mutants;
  std::vector<std::string> warnings;

  int count(MutantStatus s) const;
  /// killed / total; 0 for an empty report.
  double score() const;
};

/// Where the report fields live. Paths use property-tree syntax: elements
/// separated by '.', attributes as `<xmlattr>.name`.
struct CoverageMapping {
  std::string package_path = "report";            // elements holding packages
  std::string package_element = "package";
  std::string package_name = "<xmlattr>.name";    // slash-separated package
  std::string file_element = "sourcefile";
  std::string file_name = "<xmlattr>.name";
  std::string line_element = "line";
  std::string line_number = "<xmlattr>.nr";
  std::string covered_count = "<xmlattr>.ci";     // > 0 means covered
};

struct MutationMapping {
  std::string root = "mutations";
  std::string record = "mutation";
  std::string mutated_class = "mutatedClass";
  std::string status = "<xmlattr>.status";
  std::string line = "lineNumber";
  std::string mutator = "mutator";
  std::vector<std::string> id_fields = {"mutatedClass", "mutatedMethod", "methodDescription",
                                        "lineNumber",   "mutator",       "indexes.index",
                                        "blocks.block"};
};

/// Throws MalformedReport or CutNotInReport.
CoverageReport ingest_coverage(const std::filesystem::path& report_file, std::string_view cut_id,
                               const CoverageMapping& mapping = {});
MutationReport ingest_mutation(const std::filesystem::path& report_file, std::string_view cut_id,
                               const MutationMapping& mapping = {});

/// Parses javac and Maven style error lines ("F.java:12: error: m" and
/// "[ERROR] F.java:[12,5] m").
std::vector<Diagnostic> parse_compiler_diagnostics(std::string_view log);

/// Sums JUnit XML reports (TEST-*.xml) in `dir` for suites named
/// `test_class`, or for all suites when it is empty.
TestRunResult read_junit_reports(const std::filesystem::path& dir, std::string_view test_class = {});

struct AnalysisReports {
  std::optional<std::filesystem::path> coverage;
  std::optional<std::filesystem::path> mutation;
  std::string raw_log;
};

/// Build tool boundary. One instance serves one workspace at a time.
class Toolchain {
 public:
  virtual ~Toolchain() = default;
  virtual CompileResult compile_tests(const std::filesystem::path& workspace,
                                      const CandidateTestFile& test) = 0;
  /// Throws ContractBreach unless the same test last compiled successfully.
  virtual TestRunResult run_tests(const std::filesystem::path& workspace,
                                  const CandidateTestFile& test) = 0;
  /// Coverage and mutation analysis of a passing suite.
  virtual AnalysisReports analyze(const std::filesystem::path& workspace,
                                  const CandidateTestFile& test, std::string_view cut_id) = 0;
};

/// Replays a scenario: a JSON list of steps consumed in order, each
/// {"phase": "compile"|"run"|"analyze", "success", "diagnostics", "counts",
///  "failure_logs", "raw_log", "coverage_report", "mutation_report",
///  "timeout", "unavailable"}.
class ScriptedToolchain : public Toolchain {
 public:
  /// Relative report paths resolve against `base_dir`.
  ScriptedToolchain(nlohmann::json steps, std::filesystem::path base_dir = {});
  static ScriptedToolchain load(const std::filesystem::path& scenario_file);

  CompileResult compile_tests(const std::filesystem::path& workspace, const CandidateTestFile& test) override;
  TestRunResult run_tests(const std::filesystem::path& workspace, const CandidateTestFile& test) override;
  AnalysisReports analyze(const std::filesystem::path& workspace, const CandidateTestFile& test,
                          std::string_view cut_id) override;

  std::size_t remaining() const { return steps_.size() - next_; }

 private:
  const nlohmann::json& take(std::string_view phase);

  nlohmann::json steps_;
  std::size_t next_ = 0;
  std::filesystem::path base_dir_;
  std::optional<std::string> compiled_text_;
};

/// Command lines with {workspace}, {test_class}, {test_file} and {cut}
/// placeholders, plus where the tool leaves its reports.
struct CommandSet {
  std::string id;
  std::vector<std::string> compile;
  std::vector<std::string> run;
  std::vector<std::string> analyze;
  std::string test_source_root = "src/test/java";
  std::string junit_reports;
  std::string coverage_report;
  std::string mutation_report;
  std::chrono::milliseconds compile_timeout{std::chrono::minutes(10)};
  std::chrono::milliseconds run_timeout{std::chrono::minutes(10)};
  std::chrono::milliseconds analyze_timeout{std::chrono::minutes(60)};
};

CommandSet maven_commands();
CommandSet gradle_commands();
/// "maven", "gradle", or a JSON object with the CommandSet fields.
CommandSet command_set_from_json(const nlohmann::json& j);

struct ProcessResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs argv in `cwd`. Throws ToolchainUnavailable when argv[0] cannot be
/// found and Timeout when the deadline passes (the process group is killed).
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          std::chrono::milliseconds timeout);

class ProcessToolchain : public Toolchain {
 public:
  explicit ProcessToolchain(CommandSet commands);

  CompileResult compile_tests(const std::filesystem::path& workspace, const CandidateTestFile& test) override;
  TestRunResult run_tests(const std::filesystem::path& workspace, const CandidateTestFile& test) override;
  AnalysisReports analyze(const std::filesystem::path& workspace, const CandidateTestFile& test,
                          std::string_view cut_id) override;

  const CommandSet& commands() const { return commands_; }

 private:
  std::vector<std::string> expand(const std::vector<std::string>& argv, const std::filesystem::path& workspace,
                                  const CandidateTestFile& test, std::string_view cut_id) const;

  CommandSet commands_;
  std::optional<std::string> compiled_text_;
};

/// Fully qualified class name of a candidate test ("p.q.FooTest").
std::string test_class_name(const CandidateTestFile& test);

/// Hands out workspace paths so that no two live pipelines share one.
class WorkspaceRegistry {
 public:
  class Lease {
   public:
    Lease(WorkspaceRegistry* owner, std::filesystem::path path) : owner_(owner), path_(std::move(path)) {}
    Lease(Lease&& o) noexcept : owner_(o.owner_), path_(std::move(o.path_)) { o.owner_ = nullptr; }
    Lease& operator=(Lease&&) = delete;
    Lease(const Lease&) = delete;
    ~Lease();
    const std::filesystem::path& path() const { return path_; }

   private:
    WorkspaceRegistry* owner_;
    std::filesystem::path path_;
  };

  /// Throws WorkspaceBusy if the path is already leased.
  Lease acquire(const std::filesystem::path& path);
  bool busy(const std::filesystem::path& path) const;
  std::size_t active() const;

 private:
  void release(const std::filesystem::path& path);

  mutable std::mutex mu_;
  std::set<std::string> active_;
};

/// Copies the project into `dest` (which must not exist), skipping build
/// output directories.
void prepare_workspace(const std::filesystem::path& project_root, const std::filesystem::path& dest,
                       const std::vector<std::string>& skip_dirs = {"target", "build", ".git", ".gradle"});

/// Writes the test under `test_source_root` and returns its path.
std::filesystem::path write_test_file(const std::filesystem::path& workspace, const std::string& test_source_root,
                                      const CandidateTestFile& test);

}  // namespace stubforge
