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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace stubforge {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

double CoverageReport::ratio() const {
  return coverable_lines.empty() ? 0.0
                                 : static_cast<double>(covered_lines.size()) /
                                       static_cast<double>(coverable_lines.size());
}

std::string_view to_string(MutantStatus s) {
  switch (s) {
    case MutantStatus::Killed:
      return "killed";
    case MutantStatus::Survived:
      return "survived";
    case MutantStatus::NoCoverage:
      return "no_coverage";
    case MutantStatus::TimedOut:
      return "timed_out";
  }
  return "survived";
}

int MutationReport::count(MutantStatus s) const {
  return static_cast<int>(std::count_if(mutants.begin(), mutants.end(),
                                        [&](const Mutant& m) { return m.status == s; }));
}

double MutationReport::score() const {
  return mutants.empty() ? 0.0
                         : static_cast<double>(count(MutantStatus::Killed)) /
                               static_cast<double>(mutants.size());
}

namespace {

pt::ptree read_xml_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedReport, "cannot read report " + file.string());
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::ptree_error& e) {
    throw Error(ErrorCode::MalformedReport, file.string() + ": " + e.what());
  }
  return tree;
}

int int_field(const pt::ptree& node, const std::string& path, const fs::path& file) {
  auto v = node.get_optional<std::string>(path);
  if (!v) throw Error(ErrorCode::MalformedReport, file.string() + ": missing " + path);
  try {
    std::size_t used = 0;
    int n = std::stoi(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing text");
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedReport, file.string() + ": " + path + " is not a number: " + *v);
  }
}

// "a.b.C.Inner" -> ("a/b", "C.java"): the first capitalized segment names
// the source file.
std::pair<std::string, std::string> source_of(std::string_view cut_id) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : cut_id) {
    if (c == '.' || c == '$') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  std::size_t type_at = 0;
  while (type_at + 1 < parts.size() && !(std::isupper(static_cast<unsigned char>(parts[type_at][0]))))
    ++type_at;
  std::string pkg;
  for (std::size_t i = 0; i < type_at; ++i) pkg += (i ? "/" : "") + parts[i];
  return {pkg, parts[type_at] + ".java"};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CoverageReport ingest_coverage(const fs::path& report_file, std::string_view cut_id,
                               const CoverageMapping& m) {
  pt::ptree tree = read_xml_file(report_file);
  auto container = tree.get_child_optional(m.package_path);
  if (!container) throw Error(ErrorCode::MalformedReport, report_file.string() + ": no " + m.package_path);
  auto [pkg, file] = source_of(cut_id);
  CoverageReport r;
  r.cut_id = std::string(cut_id);
  bool found = false;
  for (const auto& [pname, pnode] : *container) {
    if (pname != m.package_element) continue;
    if (pnode.get<std::string>(m.package_name, "") != pkg) continue;
    for (const auto& [fname, fnode] : pnode) {
      if (fname != m.file_element || fnode.get<std::string>(m.file_name, "") != file) continue;
      found = true;
      for (const auto& [lname, lnode] : fnode) {
        if (lname != m.line_element) continue;
        int nr = int_field(lnode, m.line_number, report_file);
        int ci = int_field(lnode, m.covered_count, report_file);
        r.coverable_lines.insert(nr);
        if (ci > 0) r.covered_lines.insert(nr);
      }
    }
  }
  if (!found)
    throw Error(ErrorCode::CutNotInReport,
                std::string(cut_id) + " (" + pkg + "/" + file + ") not in " + report_file.string());
  return r;
}

MutationReport ingest_mutation(const fs::path& report_file, std::string_view cut_id,
                               const MutationMapping& m) {
  pt::ptree tree = read_xml_file(report_file);
  auto root = tree.get_child_optional(m.root);
  if (!root) throw Error(ErrorCode::MalformedReport, report_file.string() + ": no " + m.root);
  MutationReport r;
  r.cut_id = std::string(cut_id);
  std::set<std::string> ids;
  bool found = false;
  for (const auto& [name, node] : *root) {
    if (name != m.record) continue;
    std::string cls = node.get<std::string>(m.mutated_class, "");
    bool mine = cls == cut_id || (cls.size() > cut_id.size() && cls.compare(0, cut_id.size(), cut_id) == 0 &&
                                  cls[cut_id.size()] == '$');
    if (!mine) continue;
    found = true;
    Mutant mu;
    for (std::size_t i = 0; i < m.id_fields.size(); ++i)
      mu.id += (i ? "|" : "") + node.get<std::string>(m.id_fields[i], "");
    if (!ids.insert(mu.id).second)
      throw Error(ErrorCode::MalformedReport, report_file.string() + ": duplicate mutant " + mu.id);
    mu.mutator = node.get<std::string>(m.mutator, "");
    mu.line = int_field(node, m.line, report_file);
    std::string status = node.get<std::string>(m.status, "");
    if (status == "KILLED") {
      mu.status = MutantStatus::Killed;
    } else if (status == "SURVIVED") {
      mu.status = MutantStatus::Survived;
    } else if (status == "NO_COVERAGE") {
      mu.status = MutantStatus::NoCoverage;
    } else if (status == "TIMED_OUT") {
      mu.status = MutantStatus::TimedOut;
    } else {
      mu.status = MutantStatus::Survived;
      r.warnings.push_back("mutant " + mu.id + ": status '" + status + "' counted as survived");
    }
    r.mutants.push_back(std::move(mu));
  }
  if (!found) throw Error(ErrorCode::CutNotInReport, std::string(cut_id) + " not in " + report_file.string());
  return r;
}

std::vector<Diagnostic> parse_compiler_diagnostics(std::string_view log) {
  static const std::regex javac(R"(^(?:\[ERROR\]\s*)?(.+?\.java):(\d+):\s*(?:error:\s*)?(.*)$)");
  static const std::regex maven(R"(^\[ERROR\]\s*(.+?\.java):\[(\d+)(?:,\d+)?\]\s*(.*)$)");
  std::vector<Diagnostic> out;
  std::istringstream in{std::string(log)};
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_match(line, m, maven) ||
        (line.find("warning:") == std::string::npos && std::regex_match(line, m, javac)))
      out.push_back({m[1], std::stoi(m[2]), m[3]});
  }
  return out;
}

TestRunResult read_junit_reports(const fs::path& dir, std::string_view test_class) {
  TestRunResult r;
  if (!fs::is_directory(dir)) return r;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("TEST-", 0) == 0 && e.path().extension() == ".xml")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  auto suite = [&](const pt::ptree& s, const fs::path& file) {
    if (!test_class.empty() && s.get<std::string>("<xmlattr>.name", "") != test_class) return;
    int tests = int_field(s, "<xmlattr>.tests", file);
    int failures = s.get<int>("<xmlattr>.failures", 0);
    int errors = s.get<int>("<xmlattr>.errors", 0);
    int skipped = s.get<int>("<xmlattr>.skipped", 0);
    r.executed += tests - skipped;
    r.failed += failures + errors;
    for (const auto& [cname, c] : s) {
      if (cname != "testcase") continue;
      for (const auto& [kind, detail] : c) {
        if (kind != "failure" && kind != "error") continue;
        r.failure_logs += c.get<std::string>("<xmlattr>.classname", "") + "." +
                          c.get<std::string>("<xmlattr>.name", "") + " " + kind + ": " +
                          detail.get<std::string>("<xmlattr>.message", "") + "\n" + detail.data() + "\n";
      }
    }
  };
  for (const auto& f : files) {
    pt::ptree tree = read_xml_file(f);
    if (auto s = tree.get_child_optional("testsuite")) suite(*s, f);
    if (auto all = tree.get_child_optional("testsuites"))
      for (const auto& [n, s] : *all)
        if (n == "testsuite") suite(s, f);
  }
  r.passed = std::max(0, r.executed - r.failed);
  return r;
}

ScriptedToolchain::ScriptedToolchain(nlohmann::json steps, fs::path base_dir)
    : steps_(std::move(steps)), base_dir_(std::move(base_dir)) {
  if (!steps_.is_array()) throw Error(ErrorCode::ConfigError, "scenario must be a JSON list of steps");
  for (const auto& s : steps_) {
    std::string phase = s.is_object() ? s.value("phase", "") : "";
    if (phase != "compile" && phase != "run" && phase != "analyze")
      throw Error(ErrorCode::ConfigError, "scenario step with unknown phase '" + phase + "'");
  }
}

ScriptedToolchain ScriptedToolchain::load(const fs::path& scenario_file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(scenario_file));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, scenario_file.string() + ": " + e.what());
  }
  return ScriptedToolchain(std::move(j), scenario_file.parent_path());
}

const nlohmann::json& ScriptedToolchain::take(std::string_view phase) {
  if (next_ >= steps_.size())
    throw Error(ErrorCode::ContractBreach, "scenario exhausted at a " + std::string(phase) + " step");
  const auto& s = steps_[next_];
  if (s.at("phase").get<std::string>() != phase)
    throw Error(ErrorCode::ContractBreach, "scenario step " + std::to_string(next_) + " is " +
                                               s.at("phase").get<std::string>() + ", not " +
                                               std::string(phase));
  ++next_;
  if (s.value("unavailable", false)) throw Error(ErrorCode::ToolchainUnavailable, "scripted: build tool absent");
  if (s.value("timeout", false)) throw Error(ErrorCode::Timeout, "scripted: " + std::string(phase) + " timed out");
  return s;
}

CompileResult ScriptedToolchain::compile_tests(const fs::path&, const CandidateTestFile& test) {
  compiled_text_.reset();
  const auto& s = take("compile");
  CompileResult r;
  try {
    r.success = s.value("success", false);
    r.raw_log = s.value("raw_log", "");
    if (!r.success && s.contains("diagnostics"))
      for (const auto& d : s.at("diagnostics"))
        r.diagnostics.push_back({d.value("file", test.file_name), d.value("line", 0), d.value("message", "")});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad compile step: ") + e.what());
  }
  if (r.raw_log.empty())
    for (const auto& d : r.diagnostics)
      r.raw_log += d.file + ":" + std::to_string(d.line) + ": error: " + d.message + "\n";
  if (r.success) compiled_text_ = test.text;
  return r;
}

TestRunResult ScriptedToolchain::run_tests(const fs::path&, const CandidateTestFile& test) {
  if (!compiled_text_ || *compiled_text_ != test.text)
    throw Error(ErrorCode::ContractBreach, "run_tests without a successful compile of this test");
  const auto& s = take("run");
  TestRunResult r;
  try {
    const auto& c = s.at("counts");
    r.executed = c.at("executed").get<int>();
    r.passed = c.at("passed").get<int>();
    r.failed = c.at("failed").get<int>();
    r.failure_logs = s.value("failure_logs", "");
    r.raw_log = s.value("raw_log", r.failure_logs);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad run step: ") + e.what());
  }
  if (r.executed < 0 || r.passed < 0 || r.failed < 0 || r.passed + r.failed > r.executed)
    throw Error(ErrorCode::ConfigError, "run step counts break passed + failed <= executed");
  if (r.failed > 0 && r.failure_logs.empty()) r.failure_logs = std::to_string(r.failed) + " test(s) failed\n";
  return r;
}

AnalysisReports ScriptedToolchain::analyze(const fs::path&, const CandidateTestFile&, std::string_view) {
  const auto& s = take("analyze");
  AnalysisReports r;
  auto resolve = [&](const char* key) -> std::optional<fs::path> {
    if (!s.contains(key)) return std::nullopt;
    fs::path p = s.at(key).get<std::string>();
    return p.is_absolute() ? p : base_dir_ / p;
  };
  r.coverage = resolve("coverage_report");
  r.mutation = resolve("mutation_report");
  r.raw_log = s.value("raw_log", "");
  return r;
}

CommandSet maven_commands() {
  CommandSet c;
  c.id = "maven";
  c.compile = {"mvn", "-B", "-q", "test-compile"};
  c.run = {"mvn", "-B", "test", "-Dtest={test_class}", "-Dsurefire.failIfNoSpecifiedTests=false"};
  c.analyze = {"mvn", "-B", "test", "jacoco:report", "org.pitest:pitest-maven:mutationCoverage",
               "-Dtest={test_class}", "-DtargetClasses={cut}*", "-DtargetTests={test_class}",
               "-Dmutators=ALL", "-DoutputFormats=XML", "-DtimestampedReports=false"};
  c.junit_reports = "target/surefire-reports";
  c.coverage_report = "target/site/jacoco/jacoco.xml";
  c.mutation_report = "target/pit-reports/mutations.xml";
  return c;
}

CommandSet gradle_commands() {
  CommandSet c;
  c.id = "gradle";
  c.compile = {"gradle", "-q", "compileTestJava"};
  c.run = {"gradle", "test", "--tests", "{test_class}"};
  c.analyze = {"gradle", "test", "--tests", "{test_class}", "jacocoTestReport", "pitest"};
  c.junit_reports = "build/test-results/test";
  c.coverage_report = "build/reports/jacoco/test/jacocoTestReport.xml";
  c.mutation_report = "build/reports/pitest/mutations.xml";
  return c;
}

CommandSet command_set_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    std::string id = j.get<std::string>();
    if (id == "maven") return maven_commands();
    if (id == "gradle") return gradle_commands();
    throw Error(ErrorCode::ConfigError, "unknown build tool '" + id + "'");
  }
  try {
    CommandSet c = j.contains("base") ? command_set_from_json(j.at("base")) : CommandSet{};
    c.id = j.value("id", c.id.empty() ? std::string("custom") : c.id);
    if (j.contains("compile")) c.compile = j.at("compile").get<std::vector<std::string>>();
    if (j.contains("run")) c.run = j.at("run").get<std::vector<std::string>>();
    if (j.contains("analyze")) c.analyze = j.at("analyze").get<std::vector<std::string>>();
    c.test_source_root = j.value("test_source_root", c.test_source_root);
    c.junit_reports = j.value("junit_reports", c.junit_reports);
    c.coverage_report = j.value("coverage_report", c.coverage_report);
    c.mutation_report = j.value("mutation_report", c.mutation_report);
    if (j.contains("compile_timeout_ms")) c.compile_timeout = std::chrono::milliseconds(j.at("compile_timeout_ms").get<long long>());
    if (j.contains("run_timeout_ms")) c.run_timeout = std::chrono::milliseconds(j.at("run_timeout_ms").get<long long>());
    if (j.contains("analyze_timeout_ms"))
      c.analyze_timeout = std::chrono::milliseconds(j.at("analyze_timeout_ms").get<long long>());
    if (c.compile.empty() || c.run.empty())
      throw Error(ErrorCode::ConfigError, "build tool needs compile and run commands");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad build tool entry: ") + e.what());
  }
}

namespace {

bool executable(const fs::path& p) { return ::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p); }

std::optional<fs::path> find_program(const std::string& name, const fs::path& cwd) {
  if (name.find('/') != std::string::npos) {
    fs::path p = fs::path(name).is_absolute() ? fs::path(name) : cwd / name;
    return executable(p) ? std::optional<fs::path>(p) : std::nullopt;
  }
  const char* path = std::getenv("PATH");
  std::string dirs = path ? path : "/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    auto end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    fs::path p = fs::path(dirs.substr(start, end - start).empty() ? "." : dirs.substr(start, end - start)) / name;
    if (executable(p)) return p;
    start = end + 1;
  }
  return std::nullopt;
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& cwd,
                          std::chrono::milliseconds timeout) {
  if (argv.empty()) throw Error(ErrorCode::ToolchainUnavailable, "empty command");
  auto program = find_program(argv[0], cwd);
  if (!program) throw Error(ErrorCode::ToolchainUnavailable, "command not found: " + argv[0]);

  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw Error(ErrorCode::Io, std::string("pipe: ") + std::strerror(errno));
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(ErrorCode::Io, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    if (::chdir(cwd.c_str()) != 0) ::_exit(126);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execv(program->c_str(), args.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  ::setpgid(pid, pid);

  ProcessResult r;
  auto deadline = std::chrono::steady_clock::now() + timeout;
  bool timed_out = false;
  char buf[8192];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    r.output.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out)
    throw Error(ErrorCode::Timeout, argv[0] + " exceeded " + std::to_string(timeout.count()) + " ms");
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return r;
}

std::string test_class_name(const CandidateTestFile& test) {
  std::string stem = fs::path(test.file_name).stem().string();
  return test.declared_package.empty() ? stem : test.declared_package + "." + stem;
}

ProcessToolchain::ProcessToolchain(CommandSet commands) : commands_(std::move(commands)) {}

std::vector<std::string> ProcessToolchain::expand(const std::vector<std::string>& argv, const fs::path& workspace,
                                                  const CandidateTestFile& test, std::string_view cut_id) const {
  std::map<std::string, std::string> vars{{"{workspace}", workspace.string()},
                                          {"{test_class}", test_class_name(test)},
                                          {"{test_file}", (fs::path(commands_.test_source_root) / test.file_name).string()},
                                          {"{cut}", std::string(cut_id)}};
  std::vector<std::string> out;
  for (std::string a : argv) {
    for (const auto& [k, v] : vars)
      for (auto p = a.find(k); p != std::string::npos; p = a.find(k, p + v.size())) a.replace(p, k.size(), v);
    out.push_back(std::move(a));
  }
  return out;
}

CompileResult ProcessToolchain::compile_tests(const fs::path& workspace, const CandidateTestFile& test) {
  compiled_text_.reset();
  write_test_file(workspace, commands_.test_source_root, test);
  ProcessResult p = run_process(expand(commands_.compile, workspace, test, ""), workspace, commands_.compile_timeout);
  CompileResult r;
  r.raw_log = p.output;
  r.success = p.exit_code == 0;
  if (!r.success) {
    r.diagnostics = parse_compiler_diagnostics(p.output);
    if (r.diagnostics.empty())
      r.diagnostics.push_back({test.file_name, 0, "build failed with exit code " + std::to_string(p.exit_code)});
    compiled_text_.reset();
  } else {
    compiled_text_ = test.text;
  }
  return r;
}

TestRunResult ProcessToolchain::run_tests(const fs::path& workspace, const CandidateTestFile& test) {
  if (!compiled_text_ || *compiled_text_ != test.text)
    throw Error(ErrorCode::ContractBreach, "run_tests without a successful compile of this test");
  fs::path reports = workspace / commands_.junit_reports;
  std::error_code ec;
  fs::remove_all(reports, ec);
  ProcessResult p = run_process(expand(commands_.run, workspace, test, ""), workspace, commands_.run_timeout);
  TestRunResult r = read_junit_reports(reports, test_class_name(test));
  r.raw_log = p.output;
  if (p.exit_code != 0 && r.failed == 0) {
    // The runner failed without a structured report: count the suite as failed.
    r.failed = std::max(1, r.executed);
    r.executed = std::max(r.executed, r.failed);
    r.passed = r.executed - r.failed;
  }
  if (r.failed > 0 && r.failure_logs.empty()) r.failure_logs = p.output;
  return r;
}

AnalysisReports ProcessToolchain::analyze(const fs::path& workspace, const CandidateTestFile& test,
                                          std::string_view cut_id) {
  AnalysisReports r;
  if (commands_.analyze.empty()) return r;
  ProcessResult p =
      run_process(expand(commands_.analyze, workspace, test, cut_id), workspace, commands_.analyze_timeout);
  r.raw_log = p.output;
  if (!commands_.coverage_report.empty() && fs::is_regular_file(workspace / commands_.coverage_report))
    r.coverage = workspace / commands_.coverage_report;
  if (!commands_.mutation_report.empty() && fs::is_regular_file(workspace / commands_.mutation_report))
    r.mutation = workspace / commands_.mutation_report;
  return r;
}

WorkspaceRegistry::Lease::~Lease() {
  if (owner_) owner_->release(path_);
}

namespace {
std::string registry_key(const fs::path& p) { return fs::weakly_canonical(fs::absolute(p)).string(); }
}  // namespace

WorkspaceRegistry::Lease WorkspaceRegistry::acquire(const fs::path& path) {
  std::string key = registry_key(path);
  std::lock_guard lock(mu_);
  if (!active_.insert(key).second) throw Error(ErrorCode::WorkspaceBusy, "workspace in use: " + key);
  return Lease(this, key);
}

bool WorkspaceRegistry::busy(const fs::path& path) const {
  std::string key = registry_key(path);
  std::lock_guard lock(mu_);
  return active_.count(key) > 0;
}

std::size_t WorkspaceRegistry::active() const {
  std::lock_guard lock(mu_);
  return active_.size();
}

void WorkspaceRegistry::release(const fs::path& path) {
  std::lock_guard lock(mu_);
  active_.erase(path.string());
}

void prepare_workspace(const fs::path& project_root, const fs::path& dest, const std::vector<std::string>& skip_dirs) {
  if (!fs::is_directory(project_root)) throw Error(ErrorCode::RootNotFound, project_root.string());
  if (fs::exists(dest)) throw Error(ErrorCode::WorkspaceBusy, "workspace already exists: " + dest.string());
  fs::create_directories(dest);
  for (auto it = fs::recursive_directory_iterator(project_root); it != fs::recursive_directory_iterator(); ++it) {
    const auto& e = *it;
    fs::path rel = fs::relative(e.path(), project_root);
    if (e.is_directory()) {
      if (std::find(skip_dirs.begin(), skip_dirs.end(), e.path().filename().string()) != skip_dirs.end()) {
        it.disable_recursion_pending();
        continue;
      }
      fs::create_directories(dest / rel);
    } else if (e.is_regular_file()) {
      fs::copy_file(e.path(), dest / rel, fs::copy_options::overwrite_existing);
    }
  }
}

fs::path write_test_file(const fs::path& workspace, const std::string& test_source_root,
                         const CandidateTestFile& test) {
  fs::path p = workspace / test_source_root / test.file_name;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << test.text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return p;
}

}  // namespace stubforge
