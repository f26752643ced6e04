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

#include "stubforge/repair_engine.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

namespace stubforge {

namespace fs = std::filesystem;

std::string_view to_string(CompileOutcome o) {
  switch (o) {
    case CompileOutcome::CompiledFirstTry:
      return "CompiledFirstTry";
    case CompileOutcome::CompiledAfterRepairs:
      return "CompiledAfterRepairs";
    case CompileOutcome::NeverCompiled:
      return "NeverCompiled";
  }
  return "NeverCompiled";
}

std::string_view to_string(ExecutionOutcome o) {
  return o == ExecutionOutcome::AllPassed ? "AllPassed" : "SomeFailedFinal";
}

std::string Outcome::describe() const {
  std::string s(to_string(compile));
  if (compile == CompileOutcome::CompiledAfterRepairs) s += "(" + std::to_string(repairs) + ")";
  if (execution) s += ", " + std::string(to_string(*execution));
  return s;
}

// ---- state machine ------------------------------------------------------

RepairState::RepairState(RetryLimits limits) : limits_(limits) {
  if (limits.compile < 0 || limits.runtime < 0)
    throw Error(ErrorCode::ContractBreach, "retry limits must be >= 0");
  trace_.push_back("Generated");
}

void RepairState::enter(Phase p, int k) {
  phase_ = p;
  k_ = k;
  static const char* names[] = {"Generated", "Compiling", "CompileRepairing", "Executing", "RuntimeRepairing", "Done"};
  std::string name = names[static_cast<int>(p)];
  if (p == Phase::CompileRepairing || p == Phase::RuntimeRepairing) name += "(" + std::to_string(k) + ")";
  trace_.push_back(std::move(name));
}

void RepairState::require_live() const {
  if (phase_ == Phase::Done) throw Error(ErrorCode::ContractBreach, "repair state is already Done");
}

void RepairState::begin_compile() {
  require_live();
  if (phase_ != Phase::Generated && phase_ != Phase::CompileRepairing)
    throw Error(ErrorCode::ContractBreach, "compile must follow generation or a compile repair");
  if (compile_attempts_ >= limits_.compile + 1)
    throw Error(ErrorCode::ContractBreach, "compile attempts exhausted");
  ++compile_attempts_;
  enter(Phase::Compiling);
}

void RepairState::compile_failed() {
  if (phase_ != Phase::Compiling || compiled_) throw Error(ErrorCode::ContractBreach, "no compile in progress");
  if (compile_attempts_ > limits_.compile)
    enter(Phase::Done);
  else
    enter(Phase::CompileRepairing, compile_attempts_);
}

void RepairState::compile_succeeded() {
  if (phase_ != Phase::Compiling || compiled_) throw Error(ErrorCode::ContractBreach, "no compile in progress");
  compiled_ = true;
  first_success_ = compile_attempts_;
}

void RepairState::begin_execution() {
  require_live();
  bool from_compile = phase_ == Phase::Compiling && compiled_;
  if (!from_compile && phase_ != Phase::RuntimeRepairing)
    throw Error(ErrorCode::ContractBreach, "execution needs a compiled suite");
  if (runtime_attempts_ >= limits_.runtime + 1) throw Error(ErrorCode::ContractBreach, "runtime attempts exhausted");
  ++runtime_attempts_;
  enter(Phase::Executing);
}

void RepairState::run_failed() {
  if (phase_ != Phase::Executing) throw Error(ErrorCode::ContractBreach, "no execution in progress");
  if (runtime_attempts_ > limits_.runtime)
    enter(Phase::Done);
  else
    enter(Phase::RuntimeRepairing, runtime_attempts_);
}

void RepairState::run_passed() {
  if (phase_ != Phase::Executing) throw Error(ErrorCode::ContractBreach, "no execution in progress");
  enter(Phase::Done);
}

void RepairState::abort() {
  if (phase_ != Phase::Done) enter(Phase::Done);
}

Outcome classify_outcome(const RepairState& state, const std::optional<TestRunResult>& run) {
  if (!state.terminal()) throw Error(ErrorCode::ContractBreach, "classify_outcome on a live state");
  Outcome o;
  if (!state.compiled_) {
    if (run) throw Error(ErrorCode::ContractBreach, "execution facts for a suite that never compiled");
    return o;
  }
  o.repairs = state.first_success_ - 1;
  o.compile = o.repairs == 0 ? CompileOutcome::CompiledFirstTry : CompileOutcome::CompiledAfterRepairs;
  if (run) {
    o.tests_executed = run->executed;
    o.tests_passed = run->passed;
    o.execution = run->failed == 0 && run->executed > 0 ? ExecutionOutcome::AllPassed : ExecutionOutcome::SomeFailedFinal;
  }
  return o;
}

// ---- serialization ------------------------------------------------------

namespace {

nlohmann::ordered_json file_json(const CandidateTestFile& f) {
  return {{"file_name", f.file_name},
          {"package", f.declared_package},
          {"import_count", f.import_count},
          {"test_method_count", f.test_method_count},
          {"text", f.text}};
}

CandidateTestFile file_from(const nlohmann::json& j) {
  CandidateTestFile f;
  f.file_name = j.at("file_name").get<std::string>();
  f.declared_package = j.at("package").get<std::string>();
  f.import_count = j.at("import_count").get<int>();
  f.test_method_count = j.at("test_method_count").get<int>();
  f.text = j.at("text").get<std::string>();
  return f;
}

template <typename E>
E enum_from(const std::string& s, std::initializer_list<E> all) {
  for (E e : all)
    if (to_string(e) == s) return e;
  throw Error(ErrorCode::MalformedReport, "unknown value '" + s + "'");
}

}  // namespace

nlohmann::ordered_json to_json(const CutRunResult& r) {
  nlohmann::ordered_json j;
  j["cut_id"] = r.cut_id;
  j["mode"] = r.mode;
  nlohmann::ordered_json o;
  o["compile"] = to_string(r.outcome.compile);
  o["compile_repairs"] = r.outcome.repairs;
  o["execution"] = r.outcome.execution ? nlohmann::ordered_json(to_string(*r.outcome.execution)) : nlohmann::ordered_json(nullptr);
  o["tests_executed"] = r.outcome.tests_executed;
  o["tests_passed"] = r.outcome.tests_passed;
  o["summary"] = r.outcome.describe();
  j["outcome"] = o;
  j["compile_attempts"] = r.compile_attempts;
  j["runtime_attempts"] = r.runtime_attempts;
  j["llm_calls"] = r.llm_calls;
  j["tests_generated"] = r.tests_generated;
  j["final_test_file"] = r.final_test_file ? file_json(*r.final_test_file) : nlohmann::ordered_json(nullptr);
  j["ledger_slice"] = nlohmann::ordered_json::array();
  for (const auto& e : r.ledger_slice) j["ledger_slice"].push_back(to_json(e));
  if (r.coverage) {
    j["coverage"] = {{"covered_lines", r.coverage->covered_lines}, {"coverable_lines", r.coverage->coverable_lines}};
  } else {
    j["coverage"] = nullptr;
  }
  if (r.mutation) {
    nlohmann::ordered_json ms = nlohmann::ordered_json::array();
    for (const auto& m : r.mutation->mutants)
      ms.push_back({{"id", m.id}, {"mutator", m.mutator}, {"line", m.line}, {"status", to_string(m.status)}});
    j["mutation"] = {{"mutants", ms}, {"warnings", r.mutation->warnings}};
  } else {
    j["mutation"] = nullptr;
  }
  j["trace"] = r.trace;
  j["attempts"] = nlohmann::ordered_json::array();
  for (const auto& a : r.attempts)
    j["attempts"].push_back({{"index", a.index}, {"phase", a.phase}, {"success", a.success}, {"detail", a.detail}});
  j["warnings"] = r.warnings;
  j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
  return j;
}

CutRunResult cut_run_result_from_json(const nlohmann::json& j) {
  CutRunResult r;
  try {
    r.cut_id = j.at("cut_id").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    const auto& o = j.at("outcome");
    r.outcome.compile = enum_from(o.at("compile").get<std::string>(),
                                  {CompileOutcome::CompiledFirstTry, CompileOutcome::CompiledAfterRepairs,
                                   CompileOutcome::NeverCompiled});
    r.outcome.repairs = o.at("compile_repairs").get<int>();
    if (!o.at("execution").is_null())
      r.outcome.execution = enum_from(o.at("execution").get<std::string>(),
                                      {ExecutionOutcome::AllPassed, ExecutionOutcome::SomeFailedFinal});
    r.outcome.tests_executed = o.at("tests_executed").get<int>();
    r.outcome.tests_passed = o.at("tests_passed").get<int>();
    r.compile_attempts = j.at("compile_attempts").get<int>();
    r.runtime_attempts = j.at("runtime_attempts").get<int>();
    r.llm_calls = j.at("llm_calls").get<int>();
    r.tests_generated = j.at("tests_generated").get<int>();
    if (!j.at("final_test_file").is_null()) r.final_test_file = file_from(j.at("final_test_file"));
    for (const auto& e : j.at("ledger_slice")) r.ledger_slice.push_back(ledger_entry_from_json(e));
    if (!j.at("coverage").is_null()) {
      CoverageReport c;
      c.cut_id = r.cut_id;
      c.covered_lines = j.at("coverage").at("covered_lines").get<std::set<int>>();
      c.coverable_lines = j.at("coverage").at("coverable_lines").get<std::set<int>>();
      r.coverage = std::move(c);
    }
    if (!j.at("mutation").is_null()) {
      MutationReport m;
      m.cut_id = r.cut_id;
      for (const auto& x : j.at("mutation").at("mutants"))
        m.mutants.push_back({x.at("id").get<std::string>(), x.at("mutator").get<std::string>(), x.at("line").get<int>(),
                             enum_from(x.at("status").get<std::string>(),
                                       {MutantStatus::Killed, MutantStatus::Survived, MutantStatus::NoCoverage,
                                        MutantStatus::TimedOut})});
      m.warnings = j.at("mutation").at("warnings").get<std::vector<std::string>>();
      r.mutation = std::move(m);
    }
    r.trace = j.at("trace").get<std::vector<std::string>>();
    for (const auto& a : j.at("attempts"))
      r.attempts.push_back({a.at("index").get<int>(), a.at("phase").get<std::string>(), a.at("success").get<bool>(),
                            a.at("detail").get<std::string>()});
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedReport, std::string("bad result.json: ") + e.what());
  }
  return r;
}

std::string path_key(std::string_view key) {
  std::string out;
  for (char c : key) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

// ---- pipeline -----------------------------------------------------------

namespace {

void write_text(const fs::path& p, std::string_view text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
}

std::string two_digits(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", n);
  return buf;
}

std::string format_diagnostics(const CompileResult& c) {
  if (c.diagnostics.empty()) return c.raw_log;
  std::string s;
  for (const auto& d : c.diagnostics) s += d.file + ":" + std::to_string(d.line) + ": error: " + d.message + "\n";
  return s;
}

// Shape used when the reply had no usable test file, so the repair prompt
// can still show what came back.
CandidateTestFile candidate_of(const LlmParse& p) {
  if (p.file) return *p.file;
  CandidateTestFile f;
  f.file_name = "(unparsed reply)";
  f.text = p.text;
  return f;
}

class Pipeline {
 public:
  Pipeline(const CutProfile& cut, const MockExtract* mocks, PipelineDeps deps, const PipelineOptions& opt)
      : cut_(cut), mocks_(mocks), deps_(deps), opt_(opt), state_(opt.limits) {
    key_ = opt.cut_key.empty() ? cut.target.qualified_name : opt.cut_key;
    if (!opt.run_dir.empty()) dir_ = opt.run_dir / path_key(key_);
    res_.cut_id = cut.target.qualified_name;
    res_.mode = mocks ? "mock_informed" : "baseline";
    ctx_ = {opt.run_id, key_, CallPhase::Generate, res_.mode};
  }

  CutRunResult run() {
    PromptBundle gen = deps_.promptkit.build_generation_prompt(cut_, mocks_, opt_.token_budget);
    LlmParse parsed = inspect_llm_output(call(gen, CallPhase::Generate));
    try {
      if (compile_loop(parsed)) runtime_loop();
    } catch (const Error& e) {
      res_.error = e.what();
      state_.abort();
    }
    finish();
    return res_;
  }

 private:
  std::string call(const PromptBundle& bundle, CallPhase phase) {
    ctx_.phase = phase;
    Completion c = deps_.gateway.complete(bundle, deps_.model, deps_.retry, ctx_);
    ++res_.llm_calls;
    if (!dir_.empty()) {
      std::string name = two_digits(res_.llm_calls) + "-" + std::string(to_string(phase));
      log_prompt(dir_, name, bundle);
      write_text(dir_ / "responses" / (name + ".txt"), c.text);
    }
    return c.text;
  }

  void note_candidate(const LlmParse& p) {
    if (p.file) {
      last_candidate_ = *p.file;
      res_.tests_generated = p.file->test_method_count;
    }
  }

  void record(AttemptRecord a, const std::optional<CandidateTestFile>& file, const std::string& raw_log,
              const nlohmann::ordered_json& facts) {
    if (!dir_.empty()) {
      fs::path d = dir_ / std::to_string(a.index);
      if (file) write_text(d / fs::path(file->file_name).filename(), file->text);
      write_text(d / (a.phase + ".log"), raw_log);
      nlohmann::ordered_json j = facts;
      j["phase"] = a.phase;
      j["success"] = a.success;
      j["detail"] = a.detail;
      write_text(d / "step.json", j.dump(2) + "\n");
    }
    res_.attempts.push_back(std::move(a));
  }

  // Compiles the reply's test file; returns the diagnostics on failure.
  std::optional<std::string> try_compile(const LlmParse& parsed, const std::string& phase) {
    AttemptRecord a{++steps_, phase, false, ""};
    note_candidate(parsed);
    if (!parsed.file) {
      a.detail = "The reply could not be used as a test file (" + std::string(to_string(*parsed.error)) +
                 "): " + parsed.message + "\n";
      record(a, std::nullopt, parsed.text, {{"diagnostics", {a.detail}}});
      return a.detail;
    }
    CompileResult c;
    try {
      c = deps_.toolchain.compile_tests(opt_.workspace, *parsed.file);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Timeout) throw;
      a.detail = std::string("Compilation timed out: ") + e.what() + "\n";
      record(a, parsed.file, e.what(), {{"timeout", true}});
      return a.detail;
    }
    a.success = c.success;
    a.detail = c.success ? "" : format_diagnostics(c);
    nlohmann::ordered_json diags = nlohmann::ordered_json::array();
    for (const auto& d : c.diagnostics) diags.push_back({{"file", d.file}, {"line", d.line}, {"message", d.message}});
    record(a, parsed.file, c.raw_log, {{"diagnostics", diags}});
    if (c.success) return std::nullopt;
    return a.detail;
  }

  bool compile_loop(LlmParse parsed) {
    while (true) {
      state_.begin_compile();
      auto failure = try_compile(parsed, "compile");
      if (!failure) {
        state_.compile_succeeded();
        running_ = *parsed.file;
        return true;
      }
      state_.compile_failed();
      if (state_.terminal()) return false;
      PromptBundle b = deps_.promptkit.build_repair_prompt(cut_, candidate_of(parsed), *failure, ++repair_index_,
                                                           RepairPhase::Compile);
      parsed = inspect_llm_output(call(b, CallPhase::RepairCompile));
    }
  }

  TestRunResult execute(const CandidateTestFile& file) {
    AttemptRecord a{++steps_, "run", false, ""};
    TestRunResult r;
    bool timed_out = false;
    try {
      r = deps_.toolchain.run_tests(opt_.workspace, file);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Timeout) throw;
      // Every test of a run that never finished counts as failed.
      timed_out = true;
      r.executed = r.failed = std::max(1, file.test_method_count);
      r.failure_logs = std::string("Test execution timed out: ") + e.what() + "\n";
      r.raw_log = e.what();
    }
    if (r.failed > 0 && r.failure_logs.empty()) r.failure_logs = std::to_string(r.failed) + " test(s) failed\n";
    a.success = r.failed == 0 && r.executed > 0;
    a.detail = a.success ? "" : (r.failure_logs.empty() ? "No tests were executed.\n" : r.failure_logs);
    record(a, file, r.raw_log,
           {{"executed", r.executed}, {"passed", r.passed}, {"failed", r.failed}, {"timeout", timed_out}});
    return r;
  }

  void runtime_loop() {
    CandidateTestFile to_repair = running_;
    std::string detail;
    bool need_run = true;
    while (true) {
      state_.begin_execution();
      if (need_run) {
        TestRunResult r = execute(running_);
        last_run_ = r;
        final_file_ = running_;
        if (r.failed == 0 && r.executed > 0) {
          state_.run_passed();
          return;
        }
        detail = res_.attempts.back().detail;
        to_repair = running_;
      }
      state_.run_failed();
      if (state_.terminal()) return;
      PromptBundle b =
          deps_.promptkit.build_repair_prompt(cut_, to_repair, detail, ++repair_index_, RepairPhase::Runtime);
      LlmParse parsed = inspect_llm_output(call(b, CallPhase::RepairRuntime));
      auto failure = try_compile(parsed, "recompile");
      if (!failure) {
        running_ = *parsed.file;
        need_run = true;
      } else {
        need_run = false;
        detail = *failure;
        to_repair = candidate_of(parsed);
      }
    }
  }

  void analyze() {
    try {
      AnalysisReports a = deps_.toolchain.analyze(opt_.workspace, *final_file_, cut_.target.qualified_name);
      if (!dir_.empty()) write_text(dir_ / "analysis.log", a.raw_log);
      if (a.coverage) res_.coverage = ingest_coverage(*a.coverage, cut_.target.qualified_name);
      if (a.mutation) res_.mutation = ingest_mutation(*a.mutation, cut_.target.qualified_name);
    } catch (const Error& e) {
      res_.warnings.push_back(std::string("analysis skipped: ") + e.what());
    }
  }

  void finish() {
    res_.outcome = classify_outcome(state_, state_.compiled() ? last_run_ : std::nullopt);
    res_.compile_attempts = state_.compile_attempts();
    res_.runtime_attempts = state_.runtime_attempts();
    if (state_.compiled())
      res_.final_test_file = final_file_ ? *final_file_ : running_;
    else
      res_.final_test_file = last_candidate_;
    if (opt_.analyze && res_.outcome.execution == ExecutionOutcome::AllPassed && !res_.error) analyze();
    res_.trace = state_.trace();
    res_.trace.back() = "Done(" + res_.outcome.describe() + ")";
    for (auto& e : deps_.gateway.ledger().entries())
      if (e.run_id == opt_.run_id && e.cut_id == key_) res_.ledger_slice.push_back(std::move(e));
    if (!dir_.empty()) write_text(dir_ / "result.json", to_json(res_).dump(2) + "\n");
  }

  const CutProfile& cut_;
  const MockExtract* mocks_;
  PipelineDeps deps_;
  const PipelineOptions& opt_;
  RepairState state_;
  std::string key_;
  fs::path dir_;
  CallContext ctx_;
  CutRunResult res_;
  int steps_ = 0;
  int repair_index_ = 0;
  CandidateTestFile running_;
  std::optional<CandidateTestFile> final_file_;
  std::optional<CandidateTestFile> last_candidate_;
  std::optional<TestRunResult> last_run_;
};

// Stand-in for a job whose pipeline threw before it could classify itself.
CutRunResult failed_result(const BatchJob& job, const Error& e, const PipelineOptions& opt, LlmGateway& gateway) {
  CutRunResult r;
  std::string key = job.cut_key.empty() ? job.cut.target.qualified_name : job.cut_key;
  r.cut_id = job.cut.target.qualified_name;
  r.mode = job.mocks ? "mock_informed" : "baseline";
  r.error = e.what();
  r.trace = {"Generated", "Done(" + r.outcome.describe() + ")"};
  for (auto& entry : gateway.ledger().entries())
    if (entry.run_id == opt.run_id && entry.cut_id == key) r.ledger_slice.push_back(std::move(entry));
  r.llm_calls = static_cast<int>(r.ledger_slice.size());
  if (!opt.run_dir.empty()) write_text(opt.run_dir / path_key(key) / "result.json", to_json(r).dump(2) + "\n");
  return r;
}

}  // namespace

CutRunResult run_pipeline(const CutProfile& cut, const MockExtract* mocks, PipelineDeps deps,
                          const PipelineOptions& options) {
  return Pipeline(cut, mocks, deps, options).run();
}

std::vector<CutRunResult> run_batch(const std::vector<BatchJob>& jobs, const PromptKit& promptkit, LlmGateway& gateway,
                                    const ModelConfig& model, const ToolchainFactory& toolchains,
                                    WorkspaceRegistry& registry, const BatchOptions& options) {
  std::vector<CutRunResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  fs::path root = options.workspace_root.empty() ? options.pipeline.run_dir / "workspaces" : options.workspace_root;
  if (root.empty()) throw Error(ErrorCode::ConfigError, "a batch needs a workspace root or a run directory");
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const BatchJob& job = jobs[i];
        PipelineOptions opt = options.pipeline;
        opt.cut_key = job.cut_key.empty() ? job.cut.target.qualified_name : job.cut_key;
        opt.workspace = root / path_key(opt.cut_key);
        auto lease = registry.acquire(opt.workspace);
        auto toolchain = toolchains(job, opt.workspace);
        if (!toolchain) throw Error(ErrorCode::ToolchainUnavailable, "no toolchain for " + opt.cut_key);
        PipelineDeps deps{promptkit, gateway, model, *toolchain, options.retry};
        results[i] = run_pipeline(job.cut, job.mocks ? &*job.mocks : nullptr, deps, opt);
      } catch (const Error& e) {
        if (!options.isolate_failures) {
          errors[i] = std::current_exception();
          continue;
        }
        results[i] = failed_result(jobs[i], e, options.pipeline, gateway);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int n = std::max(1, std::min<int>(options.parallelism, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace stubforge
