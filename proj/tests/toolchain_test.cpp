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

#include "stubforge/toolchain.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "stubforge/error.hpp"
#include "support/temp_project.hpp"

namespace stubforge {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::read_text;
using testing::TempDir;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

CandidateTestFile candidate(std::string text = "class FooTest {}") {
  CandidateTestFile t;
  t.file_name = "p/FooTest.java";
  t.declared_package = "p";
  t.text = std::move(text);
  return t;
}

// Independent writer for the coverage XML layout: one line element per
// entry, hits > 0 meaning covered.
std::string coverage_xml(const std::string& pkg, const std::string& file,
                         const std::vector<std::pair<int, int>>& lines) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\"?>\n<report name=\"gen\">\n <package name=\"" << pkg << "\">\n  <sourcefile name=\""
    << file << "\">\n";
  for (auto [nr, hits] : lines) o << "   <line nr=\"" << nr << "\" mi=\"" << (hits ? 0 : 2) << "\" ci=\"" << hits << "\"/>\n";
  o << "  </sourcefile>\n </package>\n</report>\n";
  return o.str();
}

struct GenMutant {
  std::string cls;
  std::string status;
  int line;
  int index;
};

std::string mutation_xml(const std::vector<GenMutant>& ms) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\"?>\n<mutations>\n";
  for (const auto& m : ms)
    o << " <mutation status=\"" << m.status << "\"><mutatedClass>" << m.cls
      << "</mutatedClass><mutatedMethod>m</mutatedMethod><methodDescription>()V</methodDescription><lineNumber>"
      << m.line << "</lineNumber><mutator>M</mutator><indexes><index>" << m.index
      << "</index></indexes><blocks><block>0</block></blocks></mutation>\n";
  o << "</mutations>\n";
  return o.str();
}

// ---- coverage ingestion -------------------------------------------------

TEST(CoverageIngest, SmallFixtureGivesTwoThirds) {
  auto r = ingest_coverage(fixture("reports/jacoco_small.xml"), "demo.inventory.StockLedger");
  EXPECT_EQ(r.coverable_lines, (std::set<int>{10, 11, 12}));
  EXPECT_EQ(r.covered_lines, (std::set<int>{10, 11}));
  EXPECT_DOUBLE_EQ(r.ratio(), 2.0 / 3.0);
}

TEST(CoverageIngest, OtherFilesAndSameNameInOtherPackageIgnored) {
  auto r = ingest_coverage(fixture("reports/jacoco_small.xml"), "demo.inventory.StockLedger");
  EXPECT_EQ(r.coverable_lines.count(5), 0u);
  EXPECT_EQ(r.coverable_lines.count(40), 0u);
  auto w = ingest_coverage(fixture("reports/jacoco_small.xml"), "demo.inventory.Warehouse");
  EXPECT_EQ(w.covered_lines.size(), 2u);
  EXPECT_DOUBLE_EQ(w.ratio(), 1.0);
}

TEST(CoverageIngest, NestedTypeMapsToOuterSourceFile) {
  auto r = ingest_coverage(fixture("reports/jacoco_small.xml"), "demo.inventory.StockLedger.Entry");
  EXPECT_EQ(r.coverable_lines.size(), 3u);
}

TEST(CoverageIngest, MissingCutIsCutNotInReport) {
  EXPECT_EQ(code_of([] { ingest_coverage(fixture("reports/jacoco_small.xml"), "demo.inventory.Nope"); }),
            ErrorCode::CutNotInReport);
}

TEST(CoverageIngest, NinetyThreeOfHundredLines) {
  std::vector<std::pair<int, int>> lines;
  for (int i = 0; i < 100; ++i) lines.push_back({20 + i, i % 15 == 3 ? 0 : 1 + i % 4});
  // Oracle: 100 - |{i : i % 15 == 3}| = 100 - 7 = 93.
  int uncovered = 0;
  for (int i = 0; i < 100; ++i) uncovered += i % 15 == 3;
  ASSERT_EQ(uncovered, 7);
  std::mt19937 rng(7);
  std::shuffle(lines.begin(), lines.end(), rng);
  TempDir dir;
  dir.write("jacoco.xml", coverage_xml("a/b", "Svc.java", lines));
  auto r = ingest_coverage(dir.path() / "jacoco.xml", "a.b.Svc");
  EXPECT_EQ(r.covered_lines.size(), 93u);
  EXPECT_EQ(r.coverable_lines.size(), 100u);
  EXPECT_DOUBLE_EQ(r.ratio(), 0.93);
}

TEST(CoverageIngest, DefaultPackageCut) {
  TempDir dir;
  dir.write("c.xml", coverage_xml("", "Main.java", {{1, 1}, {2, 0}}));
  auto r = ingest_coverage(dir.path() / "c.xml", "Main");
  EXPECT_DOUBLE_EQ(r.ratio(), 0.5);
}

TEST(CoverageIngest, MalformedInputs) {
  TempDir dir;
  dir.write("broken.xml", "<report><package name=\"a\">");
  dir.write("wrongroot.xml", "<coverage/>");
  dir.write("badnr.xml", coverage_xml("a", "B.java", {}).replace(
                             coverage_xml("a", "B.java", {}).find("  </sourcefile>"), 0,
                             "   <line nr=\"x7\" ci=\"1\"/>\n"));
  EXPECT_EQ(code_of([&] { ingest_coverage(dir.path() / "broken.xml", "a.B"); }), ErrorCode::MalformedReport);
  EXPECT_EQ(code_of([&] { ingest_coverage(dir.path() / "wrongroot.xml", "a.B"); }), ErrorCode::MalformedReport);
  EXPECT_EQ(code_of([&] { ingest_coverage(dir.path() / "badnr.xml", "a.B"); }), ErrorCode::MalformedReport);
  EXPECT_EQ(code_of([&] { ingest_coverage(dir.path() / "absent.xml", "a.B"); }), ErrorCode::MalformedReport);
}

TEST(CoverageIngest, MappingIsDataDriven) {
  TempDir dir;
  dir.write("alt.xml",
            "<cov><units><unit id=\"x/y\"><src path=\"Z.java\">"
            "<ln n=\"3\" hits=\"0\"/><ln n=\"4\" hits=\"9\"/><ln n=\"5\" hits=\"1\"/><ln n=\"6\" hits=\"1\"/>"
            "</src></unit></units></cov>");
  CoverageMapping m;
  m.package_path = "cov.units";
  m.package_element = "unit";
  m.package_name = "<xmlattr>.id";
  m.file_element = "src";
  m.file_name = "<xmlattr>.path";
  m.line_element = "ln";
  m.line_number = "<xmlattr>.n";
  m.covered_count = "<xmlattr>.hits";
  auto r = ingest_coverage(dir.path() / "alt.xml", "x.y.Z", m);
  EXPECT_EQ(r.coverable_lines, (std::set<int>{3, 4, 5, 6}));
  EXPECT_EQ(r.covered_lines, (std::set<int>{4, 5, 6}));
}

TEST(CoverageIngest, RandomReportsKeepCoveredInsideCoverable) {
  std::mt19937 rng(2024);
  for (int round = 0; round < 40; ++round) {
    std::vector<std::pair<int, int>> lines;
    std::set<int> want_all, want_cov;
    int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      int nr = 1 + static_cast<int>(rng() % 200);
      int hits = rng() % 3 == 0 ? 0 : static_cast<int>(rng() % 5);
      lines.push_back({nr, hits});
    }
    // Oracle: a line counts as covered if any record for it has hits.
    for (auto [nr, hits] : lines) {
      want_all.insert(nr);
      if (hits > 0) want_cov.insert(nr);
    }
    TempDir dir;
    dir.write("r.xml", coverage_xml("q", "R.java", lines));
    auto r = ingest_coverage(dir.path() / "r.xml", "q.R");
    EXPECT_TRUE(std::includes(r.coverable_lines.begin(), r.coverable_lines.end(), r.covered_lines.begin(),
                              r.covered_lines.end()));
    EXPECT_EQ(r.coverable_lines, want_all);
    EXPECT_EQ(r.covered_lines, want_cov);
  }
}

// ---- mutation ingestion -------------------------------------------------

TEST(MutationIngest, TenMutantsEightKilled) {
  auto r = ingest_mutation(fixture("reports/pit_small.xml"), "demo.inventory.StockLedger");
  ASSERT_EQ(r.mutants.size(), 10u);
  EXPECT_EQ(r.count(MutantStatus::Killed), 8);
  EXPECT_EQ(r.count(MutantStatus::Survived), 1);
  EXPECT_EQ(r.count(MutantStatus::NoCoverage), 1);
  EXPECT_DOUBLE_EQ(r.score(), 0.8);
  EXPECT_TRUE(r.warnings.empty());
  std::set<std::string> ids;
  for (const auto& m : r.mutants) ids.insert(m.id);
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_EQ(r.mutants[0].line, 10);
  EXPECT_EQ(r.mutants[0].mutator, "org.pitest.mutationtest.engine.gregor.mutators.MathMutator");
}

TEST(MutationIngest, PrefixNamedClassIsNotTheCut) {
  // StockLedgerView shares a prefix but is a different class.
  auto r = ingest_mutation(fixture("reports/pit_small.xml"), "demo.inventory.StockLedger");
  for (const auto& m : r.mutants) EXPECT_EQ(m.id.find("StockLedgerView"), std::string::npos);
  auto v = ingest_mutation(fixture("reports/pit_small.xml"), "demo.inventory.StockLedgerView");
  EXPECT_EQ(v.mutants.size(), 1u);
}

TEST(MutationIngest, EightyFourOfHundred) {
  std::vector<GenMutant> ms;
  const char* other[] = {"SURVIVED", "NO_COVERAGE", "TIMED_OUT"};
  for (int i = 0; i < 100; ++i)
    ms.push_back({"a.b.Svc", i < 84 ? "KILLED" : other[i % 3], 1 + i / 3, i});
  std::mt19937 rng(84);
  std::shuffle(ms.begin(), ms.end(), rng);
  TempDir dir;
  dir.write("m.xml", mutation_xml(ms));
  auto r = ingest_mutation(dir.path() / "m.xml", "a.b.Svc");
  EXPECT_EQ(r.mutants.size(), 100u);
  EXPECT_EQ(r.count(MutantStatus::Killed), 84);
  EXPECT_DOUBLE_EQ(r.score(), 0.84);
}

TEST(MutationIngest, DuplicateIdsAreMalformed) {
  TempDir dir;
  dir.write("d.xml", mutation_xml({{"a.B", "KILLED", 3, 0}, {"a.B", "SURVIVED", 3, 0}}));
  EXPECT_EQ(code_of([&] { ingest_mutation(dir.path() / "d.xml", "a.B"); }), ErrorCode::MalformedReport);
}

TEST(MutationIngest, UnknownStatusIsSurvivedWithWarning) {
  TempDir dir;
  dir.write("u.xml", mutation_xml({{"a.B", "MEMORY_ERROR", 3, 0}, {"a.B", "KILLED", 4, 1}}));
  auto r = ingest_mutation(dir.path() / "u.xml", "a.B");
  ASSERT_EQ(r.mutants.size(), 2u);
  EXPECT_EQ(r.mutants[0].status, MutantStatus::Survived);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("MEMORY_ERROR"), std::string::npos);
}

TEST(MutationIngest, MissingCutAndBrokenFiles) {
  TempDir dir;
  dir.write("m.xml", mutation_xml({{"a.B", "KILLED", 3, 0}}));
  dir.write("bad.xml", "<mutations><mutation status=\"KILLED\">");
  dir.write("noline.xml", "<mutations><mutation status=\"KILLED\"><mutatedClass>a.B</mutatedClass></mutation></mutations>");
  EXPECT_EQ(code_of([&] { ingest_mutation(dir.path() / "m.xml", "a.C"); }), ErrorCode::CutNotInReport);
  EXPECT_EQ(code_of([&] { ingest_mutation(dir.path() / "bad.xml", "a.B"); }), ErrorCode::MalformedReport);
  EXPECT_EQ(code_of([&] { ingest_mutation(dir.path() / "noline.xml", "a.B"); }), ErrorCode::MalformedReport);
}

TEST(MutationIngest, StatusCountsAreConserved) {
  const char* statuses[] = {"KILLED", "SURVIVED", "NO_COVERAGE", "TIMED_OUT", "RUN_ERROR"};
  std::mt19937 rng(99);
  for (int round = 0; round < 40; ++round) {
    std::vector<GenMutant> ms;
    int mine = 0;
    int n = 1 + static_cast<int>(rng() % 50);
    for (int i = 0; i < n; ++i) {
      bool own = rng() % 4 != 0;
      std::string cls = own ? (rng() % 5 == 0 ? "k.Cut$Inner" : "k.Cut") : "k.Other";
      mine += own;
      ms.push_back({cls, statuses[rng() % 5], 1 + static_cast<int>(rng() % 30), i});
    }
    if (mine == 0) ms.push_back({"k.Cut", "KILLED", 1, n}), ++mine;
    TempDir dir;
    dir.write("m.xml", mutation_xml(ms));
    auto r = ingest_mutation(dir.path() / "m.xml", "k.Cut");
    int total = 0;
    for (auto s : {MutantStatus::Killed, MutantStatus::Survived, MutantStatus::NoCoverage, MutantStatus::TimedOut})
      total += r.count(s);
    EXPECT_EQ(total, mine);
    EXPECT_EQ(static_cast<int>(r.mutants.size()), mine);
    EXPECT_GE(r.score(), 0.0);
    EXPECT_LE(r.score(), 1.0);
  }
}

TEST(MutationIngest, EmptyReportScoreIsZero) {
  MutationReport r;
  EXPECT_EQ(r.score(), 0.0);
  CoverageReport c;
  EXPECT_EQ(c.ratio(), 0.0);
}

// ---- diagnostics and junit ----------------------------------------------

TEST(Diagnostics, JavacAndMavenForms) {
  std::string log =
      "src/test/java/p/FooTest.java:12: error: cannot find symbol\n"
      "  symbol:   class Bar\n"
      "[ERROR] /w/src/test/java/p/FooTest.java:[30,17] incompatible types: int cannot be converted to String\r\n"
      "src/test/java/p/FooTest.java:40: warning: [deprecation] old() in Foo has been deprecated\n"
      "[INFO] BUILD FAILURE\n";
  auto d = parse_compiler_diagnostics(log);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0], (Diagnostic{"src/test/java/p/FooTest.java", 12, "cannot find symbol"}));
  EXPECT_EQ(d[1], (Diagnostic{"/w/src/test/java/p/FooTest.java", 30,
                              "incompatible types: int cannot be converted to String"}));
  EXPECT_TRUE(parse_compiler_diagnostics("").empty());
}

TEST(JUnitReports, CountsOneSuite) {
  auto r = read_junit_reports(fixture("reports/junit"), "demo.inventory.StockLedgerTest");
  // Six test cases, one skipped, one failure and one error.
  EXPECT_EQ(r.executed, 5);
  EXPECT_EQ(r.failed, 2);
  EXPECT_EQ(r.passed, 3);
  EXPECT_NE(r.failure_logs.find("StockLedgerTest.java:41"), std::string::npos);
  EXPECT_NE(r.failure_logs.find("NullPointerException"), std::string::npos);
  EXPECT_NE(r.failure_logs.find("expected: <5> but was: <4>"), std::string::npos);
}

TEST(JUnitReports, AllSuitesAndMissingDir) {
  auto all = read_junit_reports(fixture("reports/junit"));
  EXPECT_EQ(all.executed, 7);
  EXPECT_EQ(all.passed, 5);
  auto none = read_junit_reports(fixture("reports/nothing-here"));
  EXPECT_EQ(none.executed, 0);
}

// ---- scripted adapter ---------------------------------------------------

TEST(ScriptedToolchain, FailOnceThenSucceed) {
  auto steps = nlohmann::json::parse(R"([
    {"phase": "compile", "success": false,
     "diagnostics": [{"file": "p/FooTest.java", "line": 9, "message": "cannot find symbol"}]},
    {"phase": "compile", "success": true},
    {"phase": "run", "counts": {"executed": 5, "passed": 5, "failed": 0}}
  ])");
  ScriptedToolchain tc(steps);
  auto t = candidate();
  auto first = tc.compile_tests("/ws", t);
  EXPECT_FALSE(first.success);
  ASSERT_EQ(first.diagnostics.size(), 1u);
  EXPECT_EQ(first.diagnostics[0].message, "cannot find symbol");
  EXPECT_NE(first.raw_log.find("cannot find symbol"), std::string::npos);
  auto second = tc.compile_tests("/ws", t);
  EXPECT_TRUE(second.success);
  EXPECT_TRUE(second.diagnostics.empty());
  auto run = tc.run_tests("/ws", t);
  EXPECT_EQ(std::tie(run.executed, run.passed, run.failed), std::make_tuple(5, 5, 0));
  EXPECT_EQ(tc.remaining(), 0u);
}

TEST(ScriptedToolchain, FailingRunHasLogs) {
  ScriptedToolchain tc(nlohmann::json::parse(R"js([
    {"phase": "compile", "success": true},
    {"phase": "run", "counts": {"executed": 4, "passed": 3, "failed": 1},
     "failure_logs": "org.opentest4j.AssertionFailedError: expected: <2> but was: <3>\n\tat p.FooTest.t(FooTest.java:8)"}
  ])js"));
  auto t = candidate();
  tc.compile_tests("/ws", t);
  auto r = tc.run_tests("/ws", t);
  EXPECT_EQ(r.failed, 1);
  EXPECT_NE(r.failure_logs.find("FooTest.java:8"), std::string::npos);
}

TEST(ScriptedToolchain, RunBeforeCompileIsContractBreach) {
  ScriptedToolchain tc(nlohmann::json::parse(R"([{"phase": "run", "counts": {"executed": 1, "passed": 1, "failed": 0}}])"));
  auto t = candidate();
  EXPECT_EQ(code_of([&] { tc.run_tests("/ws", t); }), ErrorCode::ContractBreach);
  EXPECT_EQ(tc.remaining(), 1u);
}

TEST(ScriptedToolchain, RunAfterFailedCompileOrDifferentTextIsContractBreach) {
  ScriptedToolchain tc(nlohmann::json::parse(R"([
    {"phase": "compile", "success": true},
    {"phase": "compile", "success": false}
  ])"));
  auto t = candidate();
  tc.compile_tests("/ws", t);
  auto changed = candidate("class FooTest { int x; }");
  EXPECT_EQ(code_of([&] { tc.run_tests("/ws", changed); }), ErrorCode::ContractBreach);
  tc.compile_tests("/ws", t);
  EXPECT_EQ(code_of([&] { tc.run_tests("/ws", t); }), ErrorCode::ContractBreach);
}

TEST(ScriptedToolchain, PhaseMismatchAndExhaustion) {
  ScriptedToolchain tc(nlohmann::json::parse(R"([{"phase": "analyze"}])"));
  auto t = candidate();
  EXPECT_EQ(code_of([&] { tc.compile_tests("/ws", t); }), ErrorCode::ContractBreach);
  ScriptedToolchain empty(nlohmann::json::array());
  EXPECT_EQ(code_of([&] { empty.compile_tests("/ws", t); }), ErrorCode::ContractBreach);
}

TEST(ScriptedToolchain, TimeoutAndUnavailableSteps) {
  ScriptedToolchain tc(nlohmann::json::parse(R"([
    {"phase": "compile", "timeout": true},
    {"phase": "compile", "unavailable": true}
  ])"));
  auto t = candidate();
  EXPECT_EQ(code_of([&] { tc.compile_tests("/ws", t); }), ErrorCode::Timeout);
  EXPECT_EQ(code_of([&] { tc.compile_tests("/ws", t); }), ErrorCode::ToolchainUnavailable);
}

TEST(ScriptedToolchain, BadScenariosRejected) {
  EXPECT_EQ(code_of([] { ScriptedToolchain(nlohmann::json::object()); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { ScriptedToolchain(nlohmann::json::parse(R"([{"phase": "deploy"}])")); }),
            ErrorCode::ConfigError);
  ScriptedToolchain tc(nlohmann::json::parse(R"([
    {"phase": "compile", "success": true},
    {"phase": "run", "counts": {"executed": 1, "passed": 1, "failed": 1}}
  ])"));
  auto t = candidate();
  tc.compile_tests("/ws", t);
  EXPECT_EQ(code_of([&] { tc.run_tests("/ws", t); }), ErrorCode::ConfigError);
}

TEST(ScriptedToolchain, AnalyzeResolvesReportsAgainstScenarioDir) {
  TempDir dir;
  dir.write("scenario.json", R"([{"phase": "analyze", "coverage_report": "r/cov.xml", "mutation_report": "/abs/m.xml"}])");
  auto tc = ScriptedToolchain::load(dir.path() / "scenario.json");
  auto r = tc.analyze("/ws", candidate(), "p.Foo");
  ASSERT_TRUE(r.coverage && r.mutation);
  EXPECT_EQ(*r.coverage, dir.path() / "r/cov.xml");
  EXPECT_EQ(*r.mutation, fs::path("/abs/m.xml"));
}

TEST(ScriptedToolchain, ReplayIsDeterministic) {
  auto steps = nlohmann::json::parse(R"([
    {"phase": "compile", "success": false, "diagnostics": [{"line": 3, "message": "';' expected"}]},
    {"phase": "compile", "success": true, "raw_log": "ok"},
    {"phase": "run", "counts": {"executed": 3, "passed": 2, "failed": 1}}
  ])");
  auto play = [&] {
    ScriptedToolchain tc(steps);
    auto t = candidate();
    std::ostringstream o;
    auto c1 = tc.compile_tests("/ws", t);
    auto c2 = tc.compile_tests("/ws", t);
    auto r = tc.run_tests("/ws", t);
    o << c1.raw_log << c1.diagnostics.size() << c2.raw_log << r.executed << r.failed << r.failure_logs;
    return o.str();
  };
  EXPECT_EQ(play(), play());
}

// ---- process adapter ----------------------------------------------------

TEST(RunProcess, CapturesOutputAndExitCode) {
  TempDir dir;
  auto r = run_process({"sh", "-c", "echo out; echo err >&2; pwd; exit 3"}, dir.path(), std::chrono::seconds(10));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("out\n"), std::string::npos);
  EXPECT_NE(r.output.find("err\n"), std::string::npos);
  EXPECT_NE(r.output.find(fs::canonical(dir.path()).string()), std::string::npos);
}

TEST(RunProcess, MissingBinaryIsUnavailable) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { run_process({"stubforge-no-such-build-tool"}, dir.path(), std::chrono::seconds(1)); }),
            ErrorCode::ToolchainUnavailable);
  EXPECT_EQ(code_of([&] { run_process({"./missing.sh"}, dir.path(), std::chrono::seconds(1)); }),
            ErrorCode::ToolchainUnavailable);
  EXPECT_EQ(code_of([&] { run_process({}, dir.path(), std::chrono::seconds(1)); }), ErrorCode::ToolchainUnavailable);
}

TEST(RunProcess, DeadlineKillsTheProcessGroup) {
  TempDir dir;
  auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(code_of([&] {
              run_process({"sh", "-c", "sleep 30 & sleep 30; echo late"}, dir.path(), std::chrono::milliseconds(300));
            }),
            ErrorCode::Timeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(10));
}

CommandSet shell_commands(const std::string& compile, const std::string& run) {
  CommandSet c;
  c.id = "sh";
  c.compile = {"sh", "-c", compile};
  c.run = {"sh", "-c", run};
  c.junit_reports = "reports";
  c.compile_timeout = c.run_timeout = std::chrono::seconds(20);
  return c;
}

TEST(ProcessToolchain, CompileFailureParsesDiagnosticsAndWritesTest) {
  TempDir ws;
  ProcessToolchain tc(shell_commands(
      "test -f {test_file} && echo '{test_file}:7: error: cannot find symbol' >&2; exit 1", "true"));
  auto t = candidate();
  auto r = tc.compile_tests(ws.path(), t);
  EXPECT_FALSE(r.success);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0], (Diagnostic{"src/test/java/p/FooTest.java", 7, "cannot find symbol"}));
  EXPECT_EQ(read_text(ws.path() / "src/test/java/p/FooTest.java"), t.text);
  EXPECT_EQ(code_of([&] { tc.run_tests(ws.path(), t); }), ErrorCode::ContractBreach);
}

TEST(ProcessToolchain, UnparsedFailureStillGetsADiagnostic) {
  TempDir ws;
  ProcessToolchain tc(shell_commands("echo 'something broke'; exit 2", "true"));
  auto r = tc.compile_tests(ws.path(), candidate());
  EXPECT_FALSE(r.success);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_NE(r.raw_log.find("something broke"), std::string::npos);
}

TEST(ProcessToolchain, CompileThenRunReadsJUnitReports) {
  TempDir ws;
  std::string src = fixture("reports/junit/TEST-demo.inventory.StockLedgerTest.xml").string();
  ProcessToolchain tc(shell_commands("echo compiled", "mkdir -p reports && cp '" + src + "' reports/ && exit 1"));
  CandidateTestFile t;
  t.file_name = "demo/inventory/StockLedgerTest.java";
  t.declared_package = "demo.inventory";
  t.text = "package demo.inventory; class StockLedgerTest {}";
  auto c = tc.compile_tests(ws.path(), t);
  ASSERT_TRUE(c.success);
  EXPECT_TRUE(c.diagnostics.empty());
  auto r = tc.run_tests(ws.path(), t);
  EXPECT_EQ(r.executed, 5);
  EXPECT_EQ(r.failed, 2);
  EXPECT_NE(r.failure_logs.find("StockLedgerTest.java:41"), std::string::npos);
}

TEST(ProcessToolchain, RunnerCrashWithoutReportCountsAsFailure) {
  TempDir ws;
  ProcessToolchain tc(shell_commands("true", "echo 'VM crashed'; exit 1"));
  auto t = candidate();
  tc.compile_tests(ws.path(), t);
  auto r = tc.run_tests(ws.path(), t);
  EXPECT_GE(r.failed, 1);
  EXPECT_LE(r.passed + r.failed, r.executed);
  EXPECT_NE(r.failure_logs.find("VM crashed"), std::string::npos);
}

TEST(ProcessToolchain, PlaceholdersExpand) {
  TempDir ws;
  CommandSet c = shell_commands("echo '{test_class}|{workspace}' > seen.txt", "true");
  c.analyze = {"sh", "-c", "echo {cut} > cut.txt"};
  ProcessToolchain tc(c);
  auto t = candidate();
  tc.compile_tests(ws.path(), t);
  EXPECT_EQ(read_text(ws.path() / "seen.txt"), "p.FooTest|" + ws.path().string() + "\n");
  auto a = tc.analyze(ws.path(), t, "p.Foo");
  EXPECT_EQ(read_text(ws.path() / "cut.txt"), "p.Foo\n");
  EXPECT_FALSE(a.coverage.has_value());
}

TEST(ProcessToolchain, MissingBuildToolIsUnavailable) {
  TempDir ws;
  CommandSet c = maven_commands();
  c.compile[0] = "stubforge-no-such-mvn";
  ProcessToolchain tc(c);
  EXPECT_EQ(code_of([&] { tc.compile_tests(ws.path(), candidate()); }), ErrorCode::ToolchainUnavailable);
}

TEST(CommandSets, ReferenceSetsAndOverrides) {
  auto m = command_set_from_json("maven");
  EXPECT_EQ(m.compile.front(), "mvn");
  EXPECT_EQ(m.coverage_report, "target/site/jacoco/jacoco.xml");
  EXPECT_EQ(m.compile_timeout, std::chrono::minutes(10));
  auto g = command_set_from_json("gradle");
  EXPECT_EQ(g.compile.front(), "gradle");
  auto custom = command_set_from_json(nlohmann::json::parse(
      R"({"base": "maven", "id": "mvnw", "compile": ["./mvnw", "test-compile"], "compile_timeout_ms": 1500})"));
  EXPECT_EQ(custom.id, "mvnw");
  EXPECT_EQ(custom.compile.front(), "./mvnw");
  EXPECT_EQ(custom.run, m.run);
  EXPECT_EQ(custom.compile_timeout, std::chrono::milliseconds(1500));
  EXPECT_EQ(code_of([] { command_set_from_json("ant"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { command_set_from_json(nlohmann::json::parse(R"({"id": "x"})")); }), ErrorCode::ConfigError);
}

// ---- workspaces ---------------------------------------------------------

TEST(Workspaces, RegistryRejectsSharedPaths) {
  WorkspaceRegistry reg;
  TempDir dir;
  {
    auto a = reg.acquire(dir.path() / "ws1");
    EXPECT_TRUE(reg.busy(dir.path() / "ws1"));
    EXPECT_EQ(code_of([&] { reg.acquire(dir.path() / "sub/../ws1"); }), ErrorCode::WorkspaceBusy);
    auto b = reg.acquire(dir.path() / "ws2");
    EXPECT_EQ(reg.active(), 2u);
  }
  EXPECT_EQ(reg.active(), 0u);
  EXPECT_FALSE(reg.busy(dir.path() / "ws1"));
}

TEST(Workspaces, ConcurrentAcquireHasOneWinnerPerPath) {
  WorkspaceRegistry reg;
  TempDir dir;
  std::atomic<int> wins{0}, busy{0};
  std::vector<std::thread> threads;
  std::vector<std::optional<WorkspaceRegistry::Lease>> held(8);
  std::mutex mu;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&, i] {
      try {
        auto lease = reg.acquire(dir.path() / ("ws" + std::to_string(i % 2)));
        ++wins;
        std::lock_guard lock(mu);
        held[i].emplace(std::move(lease));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::WorkspaceBusy) ++busy;
      }
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(wins.load(), 2);
  EXPECT_EQ(busy.load(), 6);
}

TEST(Workspaces, PrepareCopiesSourcesAndSkipsBuildOutput) {
  TempDir src, out;
  src.write("pom.xml", "<project/>");
  src.write("src/main/java/a/A.java", "class A {}");
  src.write("target/classes/a/A.class", "bin");
  src.write(".git/HEAD", "ref");
  fs::path ws = out.path() / "ws";
  prepare_workspace(src.path(), ws);
  EXPECT_EQ(read_text(ws / "src/main/java/a/A.java"), "class A {}");
  EXPECT_TRUE(fs::exists(ws / "pom.xml"));
  EXPECT_FALSE(fs::exists(ws / "target"));
  EXPECT_FALSE(fs::exists(ws / ".git"));
  EXPECT_EQ(code_of([&] { prepare_workspace(src.path(), ws); }), ErrorCode::WorkspaceBusy);
  EXPECT_EQ(code_of([&] { prepare_workspace(src.path() / "nope", out.path() / "w2"); }), ErrorCode::RootNotFound);
}

TEST(Workspaces, TestClassName) {
  EXPECT_EQ(test_class_name(candidate()), "p.FooTest");
  CandidateTestFile t;
  t.file_name = "BareTest.java";
  EXPECT_EQ(test_class_name(t), "BareTest");
}

}  // namespace
}  // namespace stubforge
