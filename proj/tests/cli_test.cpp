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

#include "stubforge/cli.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support/temp_project.hpp"

namespace stubforge {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::read_text;
using testing::TempDir;

const char* kCut = "com.zhilu.admin.repository.AopLogRepository";

nlohmann::json e2e_json() { return nlohmann::json::parse(read_text(fixture("e2e/config.json"))); }

RunConfig e2e_config(const nlohmann::json& j) { return parse_run_config(j.dump(), fixture("e2e")); }
RunConfig e2e_config() { return e2e_config(e2e_json()); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "stubforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

// ---- configuration ----

TEST(RunConfig, RoundTripIsValueIdentical) {
  auto c = e2e_config();
  auto once = to_json(c);
  auto again = to_json(parse_run_config(once.dump(), fixture("e2e")));
  EXPECT_EQ(once, again);
  EXPECT_EQ(nlohmann::json::parse(once.dump()), nlohmann::json::parse(again.dump()));
  EXPECT_EQ(c.project.root, "../paging_project");
  EXPECT_EQ(c.limits.compile_retries, 3);
}

TEST(RunConfig, CommandSetObjectSurvivesRoundTrip) {
  auto j = e2e_json();
  j["project"]["build_tool"] = {{"id", "custom"}, {"compile", {"sh", "-c", "true"}}, {"run", {"sh", "-c", "true"}}};
  j["filters"] = {{"include", {"com.*"}}, {"exclude", {"*Dto"}}, {"min_loc", 10}};
  auto c = e2e_config(j);
  EXPECT_EQ(to_json(parse_run_config(to_json(c).dump(), fixture("e2e"))), to_json(c));
  EXPECT_EQ(c.filters.criteria.loc, 10);
  EXPECT_EQ(c.filters.criteria.methods, 5);
}

TEST(RunConfig, RejectsBadValues) {
  auto with = [](const char* section, const char* key, nlohmann::json v) {
    auto j = e2e_json();
    j[section][key] = v;
    return code_of([&] { e2e_config(j); });
  };
  EXPECT_EQ(with("llm", "mode", "mockito"), ErrorCode::ConfigError);
  EXPECT_EQ(with("limits", "parallelism", 0), ErrorCode::ConfigError);
  EXPECT_EQ(with("limits", "compile_retries", -1), ErrorCode::ConfigError);
  EXPECT_EQ(with("limits", "runtime_retries", "five"), ErrorCode::ConfigError);
  EXPECT_EQ(with("llm", "temperature", 0.2), ErrorCode::ConfigError);
  EXPECT_EQ(with("project", "build_tool", "ant"), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { parse_run_config("{\"extra\": 1, \"project\": {\"root\": \".\"}}"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { parse_run_config("{not json"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { parse_run_config("{}"); }), ErrorCode::ConfigError);
}

TEST(RunConfig, RelativePathsResolveAgainstTheFile) {
  auto c = load_run_config(fixture("e2e/config.json"));
  EXPECT_EQ(c.resolve(c.project.root), (fixture("e2e") / "../paging_project").lexically_normal());
  EXPECT_EQ(c.resolve("/abs/x"), fs::path("/abs/x"));
  EXPECT_TRUE(c.resolve("").empty());
}

TEST(RunConfig, GlobSelection) {
  RunConfig::Filters f;
  EXPECT_TRUE(selected_by(f, "a.B"));
  f.include = {"com.zhilu.*"};
  EXPECT_TRUE(selected_by(f, kCut));
  EXPECT_FALSE(selected_by(f, "org.X"));
  f.exclude = {"*Repository"};
  EXPECT_FALSE(selected_by(f, kCut));
}

// ---- exit codes and run directories ----

TEST(ExitCodes, OnePerFamily) {
  std::vector<std::vector<ErrorCode>> families = {
      {ErrorCode::RootNotFound, ErrorCode::NoTestFiles, ErrorCode::ParseFailure},
      {ErrorCode::ExtractionEmpty, ErrorCode::InvariantViolation},
      {ErrorCode::BudgetImpossible, ErrorCode::NoTestFound, ErrorCode::NoPackage, ErrorCode::TemplateInvalid},
      {ErrorCode::ProviderError, ErrorCode::RetriesExhausted, ErrorCode::AuthMissing, ErrorCode::TransientTransport},
      {ErrorCode::ToolchainUnavailable, ErrorCode::Timeout, ErrorCode::ContractBreach, ErrorCode::MalformedReport,
       ErrorCode::CutNotInReport, ErrorCode::WorkspaceBusy},
      {ErrorCode::EmptySample, ErrorCode::EmptyLedger, ErrorCode::EmptyRun},
      {ErrorCode::ConfigError, ErrorCode::RunDirExists, ErrorCode::Io}};
  std::set<int> seen;
  for (const auto& family : families) {
    int code = cli::exit_code_for(family.front());
    EXPECT_NE(code, 0);
    EXPECT_NE(code, 2);  // reserved for usage errors
    for (auto c : family) EXPECT_EQ(cli::exit_code_for(c), code);
    EXPECT_TRUE(seen.insert(code).second) << code;
  }
}

TEST(RunDir, TimestampedAndNeverReused) {
  TempDir t;
  auto dir = cli::create_run_dir(t.path(), std::nullopt);
  EXPECT_EQ(dir.parent_path(), t.path());
  EXPECT_EQ(dir.filename().string().size(), 16u);  // 20261014T120000Z
  EXPECT_EQ(code_of([&] { cli::create_run_dir(t.path(), dir); }), ErrorCode::RunDirExists);
  EXPECT_EQ(cli::create_run_dir(t.path(), t.path() / "mine"), t.path() / "mine");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}), 2);
  EXPECT_EQ(run_cli({"scan"}), 2);
  EXPECT_EQ(run_cli({"generate", "-c", "x", "--run-dir", "y", "--mode", "other"}), 2);
  EXPECT_EQ(run_cli({"--help"}), 0);
}

// ---- scan ----

TEST(Scan, RunningExampleHasOneTarget) {
  TempDir t;
  std::string out;
  ASSERT_EQ(run_cli({"scan", "-c", fixture("e2e/config.json").string(), "--run-dir", (t.path() / "r").string()}, &out), 0);
  auto targets = parse_targets(read_text(t.path() / "r/targets.json"));
  ASSERT_EQ(targets.size(), 1u);
  EXPECT_EQ(targets[0].qualified_name, kCut);
  EXPECT_NE(out.find(kCut), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(read_text(t.path() / "r/config.json")), nlohmann::json::parse(to_json(e2e_config()).dump()));
}

TEST(Scan, EmptyProjectExitsWithTheScannerCode) {
  TempDir t;
  t.write("proj/src/main/java/a/A.java", "package a;\nclass A {}\n");
  t.write("c.json", R"({"project": {"root": "proj"}})");
  std::string err;
  int rc = run_cli({"scan", "-c", (t.path() / "c.json").string(), "--run-dir", (t.path() / "r").string()}, nullptr, &err);
  EXPECT_EQ(rc, cli::exit_code_for(ErrorCode::NoTestFiles));
  EXPECT_NE(err.find("NoTestFiles"), std::string::npos);
}

TEST(Scan, ExcludeGlobEmptiesTheTargets) {
  TempDir t;
  auto j = e2e_json();
  j["filters"] = {{"exclude", {"*.AopLog*"}}};
  std::ostringstream sink;
  auto targets = cli::cmd_scan(e2e_config(j), t.path(), sink);
  EXPECT_TRUE(targets.empty());
  EXPECT_TRUE(parse_targets(read_text(t.path() / "targets.json")).empty());
}

TEST(Extract, WritesTheCanonicalExtract) {
  TempDir t;
  std::ostringstream sink;
  cli::cmd_scan(e2e_config(), t.path(), sink);
  cli::cmd_extract(e2e_config(), t.path(), sink);
  EXPECT_EQ(read_text(t.path() / "extracts" / (std::string(kCut) + ".json")),
            read_text(fixture("goldens/AopLogRepository.mocks.json")));
}

// ---- generate ----

TEST(Generate, ScriptedRunReachesAllPassed) {
  TempDir t;
  std::ostringstream sink;
  auto c = e2e_config();
  cli::cmd_scan(c, t.path(), sink);
  auto results = cli::cmd_generate(c, t.path(), {}, sink);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].outcome.describe(), "CompiledAfterRepairs(1), AllPassed");
  EXPECT_EQ(results[0].llm_calls, 3);
  ASSERT_TRUE(results[0].mutation);
  EXPECT_DOUBLE_EQ(results[0].mutation->score(), 12.0 / 20);
  EXPECT_TRUE(fs::is_regular_file(t.path() / "rep-01/mock_informed" / kCut / "result.json"));
  EXPECT_EQ(CostLedger::read_jsonl(t.path() / "ledger.jsonl").size(), 3u);

  auto base = cli::cmd_generate(c, t.path(), {{}, std::string("baseline"), std::nullopt}, sink);
  ASSERT_EQ(base.size(), 1u);
  EXPECT_EQ(base[0].outcome.describe(), "CompiledFirstTry, AllPassed");
  EXPECT_EQ(code_of([&] { cli::cmd_generate(c, t.path(), {}, sink); }), ErrorCode::RunDirExists);
}

TEST(Generate, SelectorMatchingNothingIsANoOp) {
  TempDir t;
  std::ostringstream sink;
  cli::cmd_scan(e2e_config(), t.path(), sink);
  auto results = cli::cmd_generate(e2e_config(), t.path(), {"org.none.*", std::nullopt, std::nullopt}, sink);
  EXPECT_TRUE(results.empty());
  EXPECT_NE(sink.str().find("warning: no target matches"), std::string::npos);
  EXPECT_FALSE(fs::exists(t.path() / "rep-01"));
}

TEST(Generate, RequiresAScan) {
  TempDir t;
  std::ostringstream sink;
  EXPECT_EQ(code_of([&] { cli::cmd_generate(e2e_config(), t.path(), {}, sink); }), ErrorCode::ConfigError);
}

TEST(Generate, FailingCutIsRecordedNotFatal) {
  TempDir t;
  t.write("replies/empty/.keep", "");
  auto j = e2e_json();
  j["paths"]["scripted_replies"] = (t.path() / "replies/empty").string();
  std::ostringstream sink;
  cli::cmd_scan(e2e_config(j), t.path() / "run", sink);
  auto results = cli::cmd_generate(e2e_config(j), t.path() / "run", {}, sink);
  ASSERT_EQ(results.size(), 1u);
  ASSERT_TRUE(results[0].error);
  EXPECT_NE(results[0].error->find("ProviderError"), std::string::npos);
  EXPECT_EQ(results[0].outcome.compile, CompileOutcome::NeverCompiled);
  auto stored = cut_run_result_from_json(
      nlohmann::json::parse(read_text(t.path() / "run/rep-01/mock_informed" / kCut / "result.json")));
  EXPECT_EQ(stored.error, results[0].error);
}

TEST(Generate, RepetitionsGetTheirOwnDirectories) {
  TempDir t;
  std::ostringstream sink;
  cli::cmd_scan(e2e_config(), t.path(), sink);
  auto results = cli::cmd_generate(e2e_config(), t.path(), {{}, std::nullopt, 3}, sink);
  ASSERT_EQ(results.size(), 3u);
  for (const char* rep : {"rep-01", "rep-02", "rep-03"})
    EXPECT_TRUE(fs::is_regular_file(t.path() / rep / "mock_informed" / kCut / "result.json")) << rep;
  for (const auto& r : results) EXPECT_EQ(r.outcome, results[0].outcome);
  EXPECT_EQ(CostLedger::read_jsonl(t.path() / "ledger.jsonl").size(), 9u);
}

// ---- report ----

TEST(Report, ScriptedRunHasQualityAndCost) {
  TempDir t;
  std::ostringstream sink;
  cli::cmd_scan(e2e_config(), t.path(), sink);
  cli::cmd_generate(e2e_config(), t.path(), {}, sink);
  cli::cmd_generate(e2e_config(), t.path(), {{}, std::string("baseline"), std::nullopt}, sink);
  std::ostringstream tables;
  auto m = cli::cmd_report(t.path(), {}, tables);
  ASSERT_EQ(m["quality"]["pooled"].size(), 2u);
  const auto& base = m["quality"]["pooled"][0];
  const auto& mock = m["quality"]["pooled"][1];
  EXPECT_EQ(base["mode"], "baseline");
  EXPECT_EQ(mock["cft_pct"], 0.0);
  EXPECT_EQ(mock["cev_pct"], 100.0);
  EXPECT_EQ(mock["tsp_pct"], 100.0);
  EXPECT_EQ(mock["mutation_score"]["med"], 60.0);
  EXPECT_EQ(mock["line_coverage"]["med"], 77.5);
  EXPECT_EQ(base["mutation_score"]["med"], 35.0);
  // Mutant sets: six killed only with mocks, one only without.
  EXPECT_EQ(m["uniqueness"]["rows"][0]["unique_pct"]["mock_informed"], 30.0);
  EXPECT_EQ(m["uniqueness"]["rows"][0]["unique_pct"]["baseline"], 5.0);
  ASSERT_EQ(m["cost"].size(), 2u);
  // 11509 input and 2415 output tokens at 0.25 and 2.00 per million.
  EXPECT_EQ(m["cost"][1]["mean_cost_usd"], "0.00770725");
  for (const char* section : {"CFT", "CEV", "TSP", "Unique mutations killed", "Average generation cost"})
    EXPECT_NE(tables.str().find(section), std::string::npos) << section;
}

TEST(Report, ReRunIsByteIdentical) {
  TempDir t;
  std::ostringstream sink;
  cli::cmd_scan(e2e_config(), t.path(), sink);
  cli::cmd_generate(e2e_config(), t.path(), {}, sink);
  ASSERT_EQ(run_cli({"report", "--run-dir", t.path().string()}), 0);
  auto first = read_text(t.path() / "report/metrics.json");
  auto tables = read_text(t.path() / "report/tables.txt");
  ASSERT_EQ(run_cli({"report", "--run-dir", t.path().string()}), 0);
  EXPECT_EQ(read_text(t.path() / "report/metrics.json"), first);
  EXPECT_EQ(read_text(t.path() / "report/tables.txt"), tables);
}

TEST(Report, LedgerOnlyRunHasCostOnly) {
  TempDir t;
  LedgerEntry e;
  e.run_id = "r";
  e.cut_id = "c";
  e.provider_id = "openai";
  e.model_id = "gpt-4o-mini";
  e.mode = "mock_informed";
  e.completion.input_tokens = 36761;
  e.completion.output_tokens = 3506;
  e.cost_usd = Usd::parse("0.00761775");
  t.write("ledger.jsonl", to_json(e).dump() + "\n");
  std::ostringstream tables;
  auto m = cli::cmd_report(t.path(), {}, tables);
  EXPECT_TRUE(m["quality"].is_null());
  EXPECT_TRUE(m["uniqueness"].is_null());
  EXPECT_EQ(m["cost"][0]["mean_cost_usd"], "0.00761775");
  EXPECT_NE(tables.str().find("absent: no result.json"), std::string::npos);
  EXPECT_NE(tables.str().find("$0.0076"), std::string::npos);
}

TEST(Report, PublishedKillSetsGiveTheDominanceRates) {
  TempDir t;
  t.write("ledger.jsonl", "");
  t.write("rep-01/x.txt", "");
  std::string out;
  EXPECT_EQ(run_cli({"report", "--run-dir", t.path().string(), "--kills", fixture("uniqueness_matrix/kills").string()}, &out),
            cli::exit_code_for(ErrorCode::EmptyRun));
  LedgerEntry e;
  e.run_id = "r";
  e.cut_id = "c";
  e.model_id = "m";
  t.write("ledger.jsonl", to_json(e).dump() + "\n");
  ASSERT_EQ(run_cli({"report", "--run-dir", t.path().string(), "--kills", fixture("uniqueness_matrix/kills").string()}, &out), 0);
  auto m = nlohmann::json::parse(read_text(t.path() / "report/metrics.json"));
  EXPECT_EQ(m["uniqueness"]["dominance_pct"]["baseline"], 40.0);
  EXPECT_EQ(m["uniqueness"]["dominance_pct"]["randoop"], 50.0);
  EXPECT_EQ(m["uniqueness"]["rows"].size(), 10u);
  EXPECT_NE(out.find("strictly higher than randoop: 50% of CUTs"), std::string::npos);
}

TEST(Report, MissingRunDir) {
  EXPECT_EQ(run_cli({"report", "--run-dir", "/nonexistent/run"}), cli::exit_code_for(ErrorCode::EmptyRun));
}

// ---- end to end ----

TEST(EndToEnd, TwoRunsGiveIdenticalMetrics) {
  TempDir t;
  auto cfg = fixture("e2e/config.json").string();
  std::string out;
  ASSERT_EQ(run_cli({"e2e", "-c", cfg, "--run-dir", (t.path() / "a").string()}, &out), 0) << out;
  ASSERT_EQ(run_cli({"e2e", "-c", cfg, "--run-dir", (t.path() / "b").string()}), 0);
  auto a = read_text(t.path() / "a/report/metrics.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_text(t.path() / "b/report/metrics.json"));
  EXPECT_EQ(read_text(t.path() / "a/report/tables.txt"), read_text(t.path() / "b/report/tables.txt"));
  EXPECT_EQ(run_cli({"e2e", "-c", cfg, "--run-dir", (t.path() / "a").string()}), cli::exit_code_for(ErrorCode::RunDirExists));
}

}  // namespace
}  // namespace stubforge
