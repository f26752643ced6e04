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

// Acceptance checks, one PASS/FAIL line each. Exit status is the number of
// failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>

#include "stubforge/cli.hpp"
#include "stubforge/extractor.hpp"
#include "stubforge/java/parser.hpp"
#include "stubforge/metrics.hpp"
#include "stubforge/repair_engine.hpp"
#include "stubforge/scanner.hpp"
#include "support/temp_project.hpp"

namespace stubforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::data_file;
using testing::fixture;
using testing::read_text;
using testing::TempDir;

// Collects failures for one check.
struct Verdict {
  std::vector<std::string> problems;
  std::string summary;
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

const MockingDialect& mockito() {
  static const MockingDialect d = load_dialect(data_file("dialects/mockito.json"));
  return d;
}

// ---- AC1: cost cells from published token means ------------------------

void cost_reproduction(Verdict& v) {
  struct Cell {
    const char* model;
    std::int64_t in, out;
    double published;
  };
  const Cell cells[] = {
      {"gpt-4o-mini", 36761, 3506, 0.0076},      {"gpt-4o-mini", 26805, 3632, 0.0062},
      {"gpt-5-mini", 16477, 6723, 0.0176},       {"gpt-5-mini", 13352, 6852, 0.0171},
      {"gpt-5", 15228, 8377, 0.1028},            {"gpt-5", 9043, 6733, 0.0786},
      {"claude-sonnet-4-5", 78713, 18471, 0.5132}, {"claude-sonnet-4-5", 58918, 17272, 0.4358},
  };
  auto table = load_price_table(data_file("prices.json"));
  int ok = 0;
  double worst = 0;
  for (const auto& c : cells) {
    const ModelConfig* m = nullptr;
    for (const auto& row : table)
      if (row.model_id == c.model) m = &row;
    if (!m) {
      v.expect(false, std::string("no price row for ") + c.model);
      continue;
    }
    // Through the cost table so the per-run averaging is exercised too.
    LedgerEntry e;
    e.run_id = "r";
    e.cut_id = "c";
    e.provider_id = m->provider_id;
    e.model_id = m->model_id;
    e.completion.input_tokens = c.in;
    e.completion.output_tokens = c.out;
    e.cost_usd = compute_cost(c.in, c.out, *m);
    double got = cost_table({e}).front().mean_cost.to_double();
    double diff = std::fabs(got - c.published);
    worst = std::max(worst, diff);
    bool within = diff <= 0.0001 + 1e-12;
    v.expect(within, std::string(c.model) + " " + std::to_string(got) + " vs " + std::to_string(c.published));
    ok += within;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d/8 cells within $0.0001, worst difference $%.6f", ok, worst);
  v.summary = buf;
}

// ---- AC2: dominance over the published matrix --------------------------

void dominance_reproduction(Verdict& v) {
  auto j = json::parse(read_text(fixture("uniqueness_matrix/unique_mutations.json")));
  std::vector<std::pair<double, double>> vs_llm, vs_random;
  for (const auto& [cut, row] : j["rows"].items()) {
    double mock = std::stod(row[0].get<std::string>());
    vs_llm.push_back({mock, std::stod(row[1].get<std::string>())});
    vs_random.push_back({mock, std::stod(row[2].get<std::string>())});
  }
  v.expect(vs_llm.size() == 10, "matrix must have 10 rows");
  double a = dominance_rate(vs_llm), b = dominance_rate(vs_random);
  v.expect(a == 40.0, "vs baseline LLM: " + std::to_string(a));
  v.expect(b == 50.0, "vs random generation: " + std::to_string(b));
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.0f%% vs baseline LLM, %.0f%% vs random generation over %zu CUTs", a, b,
                vs_llm.size());
  v.summary = buf;
}

// ---- AC3: extraction goldens -------------------------------------------

CutProfile profile_in(const SourceIndex& index, const std::string& qn) {
  for (const auto& c : identify_mocked_targets(index, mockito()))
    if (c.qualified_name == qn) return *profile_candidate(c, index);
  throw Error(ErrorCode::InvariantViolation, "no candidate " + qn);
}

void extraction_fidelity(Verdict& v) {
  auto index = discover_test_files(fixture("paging_project"), {});
  auto x = extract_mock_info(profile_in(index, "com.zhilu.admin.repository.AopLogRepository"), index, mockito());
  auto paging = std::count_if(x.stubbings.begin(), x.stubbings.end(), [](const Stubbing& s) {
    return s.method == "pageFetchBy" && s.arguments.size() == 2 && s.arguments[0].text == "pageDto" &&
           s.arguments[1].text == "queryDto" && s.action.kind == ActionKind::Return && s.action.text == "mockResult";
  });
  v.expect(paging == 1, "paging stubbing found " + std::to_string(paging) + " times");
  v.expect(serialize_extract(x) == read_text(fixture("goldens/AopLogRepository.mocks.json")),
           "running example differs from its golden");

  std::vector<fs::path> cases;
  for (const auto& e : fs::directory_iterator(fixture("extraction")))
    if (e.is_directory()) cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());
  v.expect(cases.size() >= 12, "only " + std::to_string(cases.size()) + " corpus cases");
  int matched = 0;
  for (const auto& dir : cases) {
    auto target = json::parse(read_text(dir / "case.json")).at("target").get<std::string>();
    auto idx = discover_test_files(dir, {});
    auto got = serialize_extract(extract_mock_info(profile_in(idx, target), idx, mockito()));
    bool same = got == read_text(dir / "expected.json");
    v.expect(same, dir.filename().string() + " differs from its golden");
    matched += same;
  }
  v.summary = "running example golden byte-identical, " + std::to_string(matched) + "/" +
              std::to_string(cases.size()) + " corpus cases match";
}

// ---- AC4: repair loop --------------------------------------------------

CutProfile counter_cut() {
  CutProfile c;
  c.target.qualified_name = "acme.Counter";
  c.source_path = "src/main/java/acme/Counter.java";
  c.source_text = "package acme;\n\npublic class Counter {\n  private int n;\n  public int next() { return ++n; }\n}\n";
  return c;
}

std::string reply(int n) {
  std::string s = "```java\npackage acme;\n\nimport org.junit.jupiter.api.Test;\n\nclass CounterTest {\n";
  for (int i = 0; i < 3; ++i) s += "  @Test\n  void case" + std::to_string(i) + "() { /* v" + std::to_string(n) + " */ }\n";
  return s + "}\n```\n";
}
const char* kProse = "Sorry, no tests today.";
const char* kNoPackage = "```java\nimport org.junit.jupiter.api.Test;\nclass CounterTest {\n  @Test void a() {}\n}\n```";

class ListProvider : public Provider {
 public:
  explicit ListProvider(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  ProviderReply send(const PromptBundle&, const ModelConfig&, const CallContext&) override {
    std::lock_guard lock(mu_);
    if (next_ >= replies_.size()) throw Error(ErrorCode::ProviderError, "out of replies");
    ++next_;
    return {replies_[next_ - 1], 900 + static_cast<std::int64_t>(next_), 150, 0};
  }

 private:
  std::mutex mu_;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

json compile_ok() { return {{"phase", "compile"}, {"success", true}}; }
json compile_fail() {
  return {{"phase", "compile"},
          {"success", false},
          {"diagnostics", json::array({{{"file", "acme/CounterTest.java"}, {"line", 7}, {"message", "cannot find symbol"}}})}};
}
json run_pass() { return {{"phase", "run"}, {"counts", {{"executed", 3}, {"passed", 3}, {"failed", 0}}}}; }
json run_fail() {
  return {{"phase", "run"},
          {"counts", {{"executed", 3}, {"passed", 2}, {"failed", 1}}},
          {"failure_logs", "acme.CounterTest.case1 failure: expected: <1> but was: <2>\n"}};
}
json timeout(const char* phase) { return {{"phase", phase}, {"timeout", true}}; }

struct Scenario {
  std::string name;
  RetryLimits limits;
  std::vector<std::string> replies;
  json steps;
  std::string expected;
  int expected_calls;
};

std::vector<Scenario> scenarios() {
  std::vector<Scenario> out;
  const RetryLimits lim{2, 2};
  std::vector<std::string> many;
  for (int i = 1; i <= 8; ++i) many.push_back(reply(i));

  for (int k = 0; k <= lim.compile + 1; ++k) {
    json steps = json::array();
    int fails = std::min(k, lim.compile + 1);
    for (int i = 0; i < fails; ++i) steps.push_back(compile_fail());
    std::string expected = "NeverCompiled";
    if (k <= lim.compile) {
      steps.push_back(compile_ok());
      steps.push_back(run_pass());
      expected = k == 0 ? "CompiledFirstTry, AllPassed" : "CompiledAfterRepairs(" + std::to_string(k) + "), AllPassed";
    }
    out.push_back({"compile fails " + std::to_string(k), lim, many, steps, expected, std::min(k, lim.compile) + 1});
  }
  for (int k = 0; k <= lim.runtime + 1; ++k) {
    json steps = json::array({compile_ok()});
    int fails = std::min(k, lim.runtime + 1);
    for (int i = 0; i < fails; ++i) {
      steps.push_back(run_fail());
      if (i < lim.runtime) steps.push_back(compile_ok());
    }
    std::string expected = "CompiledFirstTry, SomeFailedFinal";
    if (k <= lim.runtime) {
      steps.push_back(run_pass());
      expected = "CompiledFirstTry, AllPassed";
    }
    out.push_back({"run fails " + std::to_string(k), lim, many, steps, expected, std::min(k, lim.runtime) + 1});
  }
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) {
      json steps = json::array();
      for (int i = 0; i < j; ++i) steps.push_back(compile_fail());
      steps.push_back(compile_ok());
      for (int i = 0; i < k; ++i) {
        steps.push_back(run_fail());
        steps.push_back(compile_ok());
      }
      steps.push_back(run_pass());
      out.push_back({"compile fails " + std::to_string(j) + " then run fails " + std::to_string(k), lim, many, steps,
                     "CompiledAfterRepairs(" + std::to_string(j) + "), AllPassed", 1 + j + k});
    }
  out.push_back({"prose reply first", lim, {kProse, reply(1)}, json::array({compile_ok(), run_pass()}),
                 "CompiledAfterRepairs(1), AllPassed", 2});
  out.push_back({"reply without package first", lim, {kNoPackage, reply(1)}, json::array({compile_ok(), run_pass()}),
                 "CompiledAfterRepairs(1), AllPassed", 2});
  out.push_back({"prose every time", lim, {kProse, kProse, kProse, kProse}, json::array(), "NeverCompiled", 3});
  out.push_back({"compile timeout first", lim, many, json::array({timeout("compile"), compile_ok(), run_pass()}),
                 "CompiledAfterRepairs(1), AllPassed", 2});
  out.push_back({"run timeout first", lim, many, json::array({compile_ok(), timeout("run"), compile_ok(), run_pass()}),
                 "CompiledFirstTry, AllPassed", 2});
  out.push_back({"run timeout every time", lim, many,
                 json::array({compile_ok(), timeout("run"), compile_ok(), timeout("run"), compile_ok(), timeout("run")}),
                 "CompiledFirstTry, SomeFailedFinal", 3});
  out.push_back({"recompile fails after a runtime repair", lim, many,
                 json::array({compile_ok(), run_fail(), compile_fail(), compile_ok(), run_pass()}),
                 "CompiledFirstTry, AllPassed", 3});
  out.push_back({"no compile budget", {0, 0}, many, json::array({compile_fail()}), "NeverCompiled", 1});
  out.push_back({"no runtime budget", {0, 0}, many, json::array({compile_ok(), run_fail()}),
                 "CompiledFirstTry, SomeFailedFinal", 1});
  return out;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_text(e.path());
  return files;
}

CutRunResult play(const Scenario& s, const PromptKit& kit, const fs::path& dir) {
  CostLedger ledger;
  LlmGateway gateway(ledger, {}, [](std::chrono::milliseconds) {});
  gateway.register_provider("list", std::make_shared<ListProvider>(s.replies));
  ModelConfig model;
  model.provider_id = "list";
  model.model_id = "l1";
  model.input_price_per_million = Usd::parse("1.00");
  model.output_price_per_million = Usd::parse("2.00");
  ScriptedToolchain toolchain(s.steps);
  PipelineOptions opt;
  opt.limits = s.limits;
  opt.analyze = false;
  opt.run_dir = dir;
  auto r = run_pipeline(counter_cut(), nullptr, PipelineDeps{kit, gateway, model, toolchain}, opt);
  if (toolchain.remaining() != 0) throw Error(ErrorCode::ContractBreach, std::to_string(toolchain.remaining()) + " steps unused");
  if (ledger.size() != static_cast<std::size_t>(r.llm_calls)) throw Error(ErrorCode::ContractBreach, "ledger and call count differ");
  return r;
}

void repair_loop_contract(Verdict& v) {
  auto kit = PromptKit::load(data_file("templates"));
  auto all = scenarios();
  v.expect(all.size() >= 20, "only " + std::to_string(all.size()) + " scenarios");
  int ok = 0;
  for (const auto& s : all) {
    TempDir a, b;
    auto ra = play(s, kit, a.path());
    auto rb = play(s, kit, b.path());
    bool good = true;
    auto check = [&](bool cond, const std::string& what) {
      if (!cond) {
        good = false;
        v.expect(false, s.name + ": " + what);
      }
    };
    check(ra.llm_calls <= 1 + s.limits.compile + s.limits.runtime, "too many calls");
    check(ra.llm_calls == s.expected_calls, std::to_string(ra.llm_calls) + " calls");
    check(ra.outcome.describe() == s.expected, ra.outcome.describe());
    check(to_json(ra).dump() == to_json(rb).dump(), "result differs on replay");
    check(tree(a.path()) == tree(b.path()), "artifacts differ on replay");
    ok += good;
  }
  v.summary = std::to_string(ok) + "/" + std::to_string(all.size()) + " scenarios bounded, classified and replayed";
}

// ---- AC5: metrics oracles ----------------------------------------------

double oracle_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  auto rank = [&](double x) {
    double less = 0, equal = 0;
    for (double y : all) {
      less += y < x;
      equal += y == x;
    }
    return less + (equal + 1) / 2;
  };
  double n = static_cast<double>(all.size()), grand = (n + 1) / 2, between = 0, total = 0;
  for (const auto& g : groups) {
    double mean = 0;
    for (double x : g) mean += rank(x);
    mean /= static_cast<double>(g.size());
    between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double x : g) total += (rank(x) - grand) * (rank(x) - grand);
  }
  return total == 0 ? 0 : (n - 1) * between / total;
}

void metrics_oracles(Verdict& v) {
  std::mt19937 rng(20261014);

  int unique_cases = 0;
  for (; unique_cases < 1000; ++unique_cases) {
    int mutants = 1 + static_cast<int>(rng() % 12), techniques = 2 + static_cast<int>(rng() % 3);
    TechniqueKillMap m;
    for (int i = 0; i < mutants; ++i) m.universe.insert(std::to_string(i));
    for (int t = 0; t < techniques; ++t)
      for (int i = 0; i < mutants; ++i)
        if (rng() % 2) m.kills[std::to_string(t)].insert(std::to_string(i));
    for (int t = 0; t < techniques; ++t) m.kills[std::to_string(t)];
    auto got = unique_killed(m);
    for (const auto& [t, ids] : m.kills) {
      std::set<std::string> want;
      for (const auto& id : ids) {
        bool elsewhere = false;
        for (const auto& [s, other] : m.kills)
          if (s != t && other.count(id)) elsewhere = true;
        if (!elsewhere) want.insert(id);
      }
      if (got[t].ids != want || std::fabs(got[t].pct - 100.0 * want.size() / mutants) > 1e-9) {
        v.expect(false, "unique_killed disagrees on case " + std::to_string(unique_cases));
        return;
      }
    }
  }

  int summaries = 0;
  for (; summaries < 500; ++summaries) {
    std::vector<double> xs(1 + rng() % 30);
    for (auto& x : xs) x = static_cast<double>(rng() % 1000) / 10;
    auto s = xs;
    std::sort(s.begin(), s.end());
    double mean = 0;
    for (double x : s) mean += x;
    mean /= static_cast<double>(s.size());
    double ss = 0;
    for (double x : s) ss += (x - mean) * (x - mean);
    double sd = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0;
    double med = s.size() % 2 ? s[s.size() / 2] : (s[s.size() / 2 - 1] + s[s.size() / 2]) / 2;
    auto q = summarize_quality(xs);
    if (q.min != s.front() || q.max != s.back() || q.med != med || std::fabs(q.stdev - sd) > 1e-9) {
      v.expect(false, "summarize_quality disagrees on sample " + std::to_string(summaries));
      return;
    }
  }

  double h = kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}).h_statistic;
  v.expect(std::fabs(h - 7.2) < 1e-12, "hand case H = " + std::to_string(h));

  int monotone = 0;
  for (; monotone < 500; ++monotone) {
    std::vector<std::vector<double>> g(2 + rng() % 3);
    for (auto& x : g) {
      x.resize(1 + rng() % 10);
      for (auto& y : x) y = static_cast<double>(rng() % 12) - 6;
    }
    auto base = kruskal_wallis(g);
    auto moved = g;
    for (auto& x : moved)
      for (auto& y : x) y = std::exp(y / 3) + y * y * y;
    auto r = kruskal_wallis(moved);
    if (std::fabs(r.h_statistic - base.h_statistic) > 1e-9 || std::fabs(base.h_statistic - oracle_h(g)) > 1e-9) {
      v.expect(false, "rank test not monotone invariant on sample " + std::to_string(monotone));
      return;
    }
  }

  int result_sets = 0;
  for (; result_sets < 500; ++result_sets) {
    std::vector<CutRunResult> rs(1 + rng() % 15);
    for (auto& r : rs) {
      int k = static_cast<int>(rng() % 3);
      r.outcome.compile = k == 0 ? CompileOutcome::CompiledFirstTry
                          : k == 1 ? CompileOutcome::CompiledAfterRepairs
                                   : CompileOutcome::NeverCompiled;
    }
    auto c = compilation_rates(rs);
    if (c.cev_pct < c.cft_pct) {
      v.expect(false, "CEV below CFT");
      return;
    }
  }
  v.summary = std::to_string(unique_cases) + " uniqueness cases, " + std::to_string(summaries) + " summaries, H = 7.2, " +
              std::to_string(monotone) + " monotone samples, " + std::to_string(result_sets) + " result sets";
}

// ---- AC6: scanner thresholds and complexity ----------------------------

std::string synthetic_class(const std::string& name, int loc, int methods, int cc) {
  std::string s = "package s;\npublic class " + name + " {\n";
  int lines = 2;
  s += "  int m0(int x) {\n";
  lines += 2;
  for (int i = 1; i < cc; ++i, ++lines) s += "    if (x > " + std::to_string(i) + ") x++;\n";
  s += "    return x;\n";
  ++lines;
  s += "  }\n";
  for (int m = 1; m < methods; ++m, ++lines) s += "  int m" + std::to_string(m) + "() { return 0; }\n";
  while (lines < loc) {
    s += "  int f" + std::to_string(lines) + ";\n";
    ++lines;
  }
  return s + "}\n";
}

int naive_cc(const std::string& body) {
  std::string s = body;
  s = std::regex_replace(s, std::regex(R"(/\*[\s\S]*?\*/)"), " ");
  s = std::regex_replace(s, std::regex(R"(//[^\n]*)"), " ");
  s = std::regex_replace(s, std::regex(R"("(\\.|[^"\\])*")"), "\"\"");
  s = std::regex_replace(s, std::regex(R"('(\\.|[^'\\])*')"), "''");
  auto count = [&](const std::regex& re) {
    return static_cast<int>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
  };
  int n = count(std::regex(R"(\b(if|for|while|case|catch)\b)"));
  n += count(std::regex(R"(&&|\|\|)"));
  n += count(std::regex(R"(([^<,\s]\s*)\?)"));
  return 1 + n;
}

void scanner_criteria(Verdict& v) {
  struct Row {
    const char* name;
    int loc, methods, cc;
  };
  // Published CUT profiles followed by near misses on each threshold.
  const Row rows[] = {{"CAS", 209, 13, 9},  {"RRA", 336, 15, 13}, {"MAS", 100, 8, 13},  {"MUT", 271, 16, 10},
                      {"MQS", 125, 6, 8},   {"MPC", 205, 8, 12},  {"QPC", 150, 6, 6},   {"SMS", 130, 19, 7},
                      {"ALR", 92, 7, 22},   {"URE", 97, 7, 10},   {"Short", 49, 9, 9},  {"Few", 120, 4, 9},
                      {"Flat", 120, 9, 4},  {"Edge", 50, 5, 5},   {"Tiny", 12, 2, 1}};
  TempDir dir;
  std::string test = "package s;\nimport static org.mockito.Mockito.*;\nclass STest {\n";
  std::set<std::string> want;
  for (const auto& r : rows) {
    dir.write(std::string("src/main/java/s/") + r.name + ".java", synthetic_class(r.name, r.loc, r.methods, r.cc));
    test += std::string("  @Test void t") + r.name + "() { " + r.name + " m = mock(" + r.name +
            ".class); when(m.m1()).thenReturn(1); }\n";
    if (r.loc >= 50 && r.methods >= 5 && r.cc >= 5) want.insert(std::string("s.") + r.name);
  }
  dir.write("src/test/java/s/STest.java", test + "}\n");
  auto index = discover_test_files(dir.path(), {});
  std::set<std::string> got;
  for (const auto& c : select_cuts(filter_project_owned(identify_mocked_targets(index, mockito()), index), index))
    got.insert(c.target.qualified_name);
  v.expect(got == want, "selected " + std::to_string(got.size()) + " rows, expected " + std::to_string(want.size()));
  for (const auto& r : rows) {
    const auto* u = index.find(std::string("s.") + r.name);
    v.expect(u && u->loc == r.loc && static_cast<int>(u->methods.size()) == r.methods,
             std::string(r.name) + " profile did not round-trip");
  }

  int methods = 0, agree = 0;
  for (const auto& e : fs::recursive_directory_iterator(fixture(""))) {
    if (e.path().extension() != ".java") continue;
    java::CompilationUnit unit;
    try {
      unit = java::parse_compilation_unit(read_text(e.path()), e.path().string());
    } catch (const Error&) {
      continue;
    }
    java::for_each_type(unit.types, [&](const java::TypeDecl& t) {
      for (const auto& m : t.methods) {
        if (!m.body) continue;
        const auto& first = unit.tokens[m.body->tokens.begin];
        const auto& last = unit.tokens[m.body->tokens.end - 1];
        std::string text = unit.source.substr(first.offset, last.offset + last.length - first.offset);
        ++methods;
        bool same = compute_cyclomatic_complexity(*m.body) == naive_cc(text);
        agree += same;
        v.expect(same, e.path().filename().string() + " " + m.name);
      }
    });
  }
  v.expect(methods > 40, "only " + std::to_string(methods) + " fixture methods");
  v.summary = std::to_string(got.size()) + "/" + std::to_string(std::size(rows)) + " rows kept as expected, complexity agrees on " +
              std::to_string(agree) + "/" + std::to_string(methods) + " fixture methods";
}

// ---- AC7: end-to-end determinism ---------------------------------------

int cli_run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"stubforge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

void end_to_end_determinism(Verdict& v) {
  TempDir t;
  auto cfg = fixture("e2e/config.json").string();
  for (const char* name : {"a", "b"}) {
    int rc = cli_run({"e2e", "-c", cfg, "--run-dir", (t.path() / name).string()});
    v.expect(rc == 0, std::string("e2e run ") + name + " exited " + std::to_string(rc));
  }
  auto a = read_text(t.path() / "a/report/metrics.json");
  auto b = read_text(t.path() / "b/report/metrics.json");
  v.expect(!a.empty(), "no metrics.json");
  v.expect(a == b, "metrics.json differs between runs");
  auto m = json::parse(a.empty() ? "{}" : a);
  bool passed = m.contains("quality") && m["quality"].is_object() &&
                m["quality"]["per_cut"][0]["outcome"] == "CompiledAfterRepairs(1), AllPassed";
  v.expect(passed, "scripted CUT did not reach AllPassed");
  v.summary = "two e2e runs gave byte-identical metrics.json (" + std::to_string(a.size()) + " bytes)";
}

}  // namespace
}  // namespace stubforge

int main() {
  using namespace stubforge;
  struct Check {
    const char* id;
    const char* name;
    std::function<void(Verdict&)> body;
    double budget_s;
  };
  const Check checks[] = {
      {"AC1", "cost reproduction", cost_reproduction, 1},
      {"AC2", "dominance reproduction", dominance_reproduction, 1},
      {"AC3", "extraction fidelity", extraction_fidelity, 0},
      {"AC4", "repair-loop contract", repair_loop_contract, 10},
      {"AC5", "metrics oracle suite", metrics_oracles, 30},
      {"AC6", "scanner criteria", scanner_criteria, 0},
      {"AC7", "end-to-end determinism", end_to_end_determinism, 0},
  };
  int failed = 0;
  for (const auto& c : checks) {
    Verdict v;
    auto start = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.problems.push_back(std::string("threw ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s) v.problems.push_back("took " + std::to_string(secs) + " s");
    bool pass = v.problems.empty();
    failed += !pass;
    std::printf("%s %s %s: %s (%.3f s)\n", c.id, pass ? "PASS" : "FAIL", c.name, v.summary.c_str(), secs);
    for (std::size_t i = 0; i < v.problems.size() && i < 10; ++i) std::printf("    %s\n", v.problems[i].c_str());
  }
  return failed;
}
