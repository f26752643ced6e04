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

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "stubforge/dialect.hpp"
#include "stubforge/extractor.hpp"
#include "stubforge/llm_gateway.hpp"
#include "stubforge/promptkit.hpp"
#include "stubforge/repair_engine.hpp"
#include "stubforge/scanner.hpp"
#include "stubforge/toolchain.hpp"

namespace stubforge::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::RootNotFound:
    case ErrorCode::NoTestFiles:
    case ErrorCode::ParseFailure:
      return 10;
    case ErrorCode::ExtractionEmpty:
    case ErrorCode::InvariantViolation:
      return 11;
    case ErrorCode::BudgetImpossible:
    case ErrorCode::NoTestFound:
    case ErrorCode::NoPackage:
    case ErrorCode::TemplateInvalid:
      return 12;
    case ErrorCode::ProviderError:
    case ErrorCode::RetriesExhausted:
    case ErrorCode::AuthMissing:
    case ErrorCode::TransientTransport:
      return 13;
    case ErrorCode::ToolchainUnavailable:
    case ErrorCode::Timeout:
    case ErrorCode::ContractBreach:
    case ErrorCode::MalformedReport:
    case ErrorCode::CutNotInReport:
    case ErrorCode::WorkspaceBusy:
      return 14;
    case ErrorCode::EmptySample:
    case ErrorCode::EmptyLedger:
    case ErrorCode::EmptyRun:
      return 15;
    case ErrorCode::ConfigError:
    case ErrorCode::RunDirExists:
    case ErrorCode::Io:
      return 16;
  }
  return 1;
}

fs::path default_data_dir() { return STUBFORGE_DATA_DIR; }

namespace {

fs::path or_default(const RunConfig& c, const std::string& configured, const char* bundled) {
  return configured.empty() ? default_data_dir() / bundled : c.resolve(configured);
}

void write_file(const fs::path& p, const std::string& text) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScanConfig scan_config(const RunConfig& c) {
  ScanConfig sc;
  sc.test_roots = c.project.test_roots;
  return sc;
}

// Everything derived from the project sources, rebuilt by each command.
struct Sources {
  MockingDialect dialect;
  ScanConfig scan;
  SourceIndex index;
};

Sources load_sources(const RunConfig& c) {
  Sources s{load_dialect(or_default(c, c.paths.dialect, "dialects/mockito.json")), scan_config(c), {}};
  s.index = discover_test_files(c.resolve(c.project.root), s.scan);
  return s;
}

std::vector<CandidateTarget> read_targets(const fs::path& run_dir) {
  fs::path p = run_dir / "targets.json";
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::ConfigError, "no targets.json in " + run_dir.string() + "; run scan first");
  return parse_targets(read_file(p));
}

std::string two_digits(int n) {
  std::ostringstream ss;
  ss << std::setw(2) << std::setfill('0') << n;
  return ss.str();
}

std::shared_ptr<Provider> make_provider(const RunConfig& c, const std::string& mode) {
  if (c.llm.provider == "scripted") {
    fs::path dir = c.resolve(c.paths.scripted_replies);
    if (fs::is_directory(dir / mode)) dir /= mode;
    return std::make_shared<ScriptedProvider>(dir);
  }
  if (c.llm.provider == "openai") return std::make_shared<OpenAiProvider>();
  if (c.llm.provider == "anthropic") return std::make_shared<AnthropicProvider>();
  throw Error(ErrorCode::ConfigError, "no provider adapter for '" + c.llm.provider + "'");
}

ToolchainFactory make_toolchains(const RunConfig& c, const std::string& mode) {
  const auto& tool = c.project.build_tool;
  if (tool.is_string() && tool.get<std::string>() == "scripted") {
    fs::path dir = c.resolve(c.paths.scripted_toolchain);
    return [dir, mode](const BatchJob& job, const fs::path& ws) -> std::unique_ptr<Toolchain> {
      std::string key = path_key(job.cut_key.empty() ? job.cut.target.qualified_name : job.cut_key);
      fs::path scenario = dir / mode / (key + ".json");
      if (!fs::is_regular_file(scenario)) scenario = dir / (key + ".json");
      if (!fs::is_regular_file(scenario))
        throw Error(ErrorCode::ToolchainUnavailable, "no scripted scenario for " + key);
      fs::create_directories(ws);
      return std::make_unique<ScriptedToolchain>(ScriptedToolchain::load(scenario));
    };
  }
  CommandSet commands = command_set_from_json(tool);
  fs::path root = c.resolve(c.project.root);
  return [commands, root](const BatchJob&, const fs::path& ws) -> std::unique_ptr<Toolchain> {
    prepare_workspace(root, ws);
    return std::make_unique<ProcessToolchain>(commands);
  };
}

void print_targets(const std::vector<CutProfile>& cuts, std::ostream& out) {
  out << std::left << std::setw(52) << "target" << std::right << std::setw(6) << "LOC" << std::setw(9) << "methods"
      << std::setw(8) << "max CC" << std::setw(8) << "stubs" << std::setw(10) << "verifies" << "\n";
  for (const auto& p : cuts)
    out << std::left << std::setw(52) << p.target.qualified_name << std::right << std::setw(6) << p.loc << std::setw(9)
        << p.method_count << std::setw(8) << p.max_cc << std::setw(8) << p.target.stubbing_count << std::setw(10)
        << p.target.verify_count << "\n";
}

}  // namespace

fs::path create_run_dir(const fs::path& parent, const std::optional<fs::path>& explicit_dir) {
  fs::path dir;
  if (explicit_dir) {
    dir = *explicit_dir;
  } else {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream name;
    name << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    dir = parent / name.str();
  }
  if (fs::exists(dir)) throw Error(ErrorCode::RunDirExists, dir.string() + " already exists");
  std::error_code ec;
  fs::create_directories(dir.parent_path(), ec);
  if (!fs::create_directory(dir, ec) || ec)
    throw Error(ErrorCode::RunDirExists, "cannot create " + dir.string() + (ec ? ": " + ec.message() : ""));
  return dir;
}

std::vector<CandidateTarget> cmd_scan(const RunConfig& config, const fs::path& run_dir, std::ostream& out) {
  auto src = load_sources(config);
  for (const auto& w : src.index.warnings) out << "warning: " << w << "\n";
  auto candidates = filter_project_owned(identify_mocked_targets(src.index, src.dialect, src.scan), src.index);
  std::vector<CutProfile> cuts;
  for (auto& p : select_cuts(candidates, src.index, config.filters.criteria))
    if (selected_by(config.filters, p.target.qualified_name)) cuts.push_back(std::move(p));
  std::vector<CandidateTarget> targets;
  for (const auto& p : cuts) targets.push_back(p.target);
  write_file(run_dir / "config.json", to_json(config).dump(2) + "\n");
  write_file(run_dir / "targets.json", serialize_targets(targets));
  print_targets(cuts, out);
  out << targets.size() << " of " << candidates.size() << " mocked project types selected\n";
  return targets;
}

void cmd_extract(const RunConfig& config, const fs::path& run_dir, std::ostream& out) {
  auto src = load_sources(config);
  MockCorpus corpus(src.index, src.dialect, src.scan);
  for (const auto& t : read_targets(run_dir)) {
    auto profile = profile_candidate(t, src.index);
    if (!profile) {
      out << "warning: " << t.qualified_name << " is no longer in the project\n";
      continue;
    }
    auto x = extract_mock_info(*profile, corpus);
    write_file(run_dir / "extracts" / (path_key(t.qualified_name) + ".json"), serialize_extract(x));
    out << t.qualified_name << ": " << x.stubbings.size() << " stubbings, " << x.verifications.size()
        << " verifications\n";
  }
}

std::vector<CutRunResult> cmd_generate(const RunConfig& config, const fs::path& run_dir, const GenerateOptions& options,
                                       std::ostream& out) {
  std::string mode = options.mode.value_or(config.llm.mode);
  if (!is_valid_mode(mode)) throw Error(ErrorCode::ConfigError, "unknown mode '" + mode + "'");
  int repetitions = options.repetitions.value_or(config.repetitions);
  if (repetitions < 1) throw Error(ErrorCode::ConfigError, "repetitions must be >= 1");

  auto targets = read_targets(run_dir);
  auto src = load_sources(config);
  std::vector<BatchJob> jobs;
  {
    MockCorpus corpus(src.index, src.dialect, src.scan);
    for (const auto& t : targets) {
      if (!options.selector.empty() && !name_matches(options.selector, t.qualified_name)) continue;
      auto profile = profile_candidate(t, src.index);
      if (!profile) {
        out << "warning: " << t.qualified_name << " is no longer in the project\n";
        continue;
      }
      BatchJob job{*profile, std::nullopt, {}};
      if (mode == "mock_informed") {
        try {
          job.mocks = extract_mock_info(*profile, corpus);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ExtractionEmpty) throw;
          out << "warning: " << t.qualified_name << " has no mock operations left; prompting without them\n";
        }
      }
      jobs.push_back(std::move(job));
    }
  }
  if (jobs.empty()) {
    out << "warning: no target matches '" << options.selector << "'\n";
    return {};
  }

  auto kit = PromptKit::load(or_default(config, config.paths.templates, "templates"));
  auto prices = load_price_table(or_default(config, config.paths.prices, "prices.json"));
  const ModelConfig* model = find_model(prices, config.llm.provider, config.llm.model);
  if (!model)
    throw Error(ErrorCode::ConfigError, "no price entry for " + config.llm.provider + "/" + config.llm.model);

  CostLedger ledger(run_dir / "ledger.jsonl");
  WorkspaceRegistry registry;
  std::vector<CutRunResult> all;
  for (int rep = 1; rep <= repetitions; ++rep) {
    std::string rep_name = "rep-" + two_digits(rep);
    fs::path dir = run_dir / rep_name / mode;
    if (fs::exists(dir)) throw Error(ErrorCode::RunDirExists, dir.string() + " already exists");
    LlmGateway gateway(ledger);
    gateway.register_provider(model->provider_id, make_provider(config, mode), config.llm.requests_per_minute);
    BatchOptions bo;
    bo.pipeline.limits = {config.limits.compile_retries, config.limits.runtime_retries};
    bo.pipeline.token_budget = config.llm.budget;
    bo.pipeline.run_dir = dir;
    bo.pipeline.run_id = rep_name + "/" + mode;
    bo.retry.max_attempts = config.llm.max_attempts;
    bo.parallelism = config.limits.parallelism;
    bo.isolate_failures = true;
    bo.workspace_root = run_dir / "workspaces" / rep_name / mode;
    auto results = run_batch(jobs, kit, gateway, *model, make_toolchains(config, mode), registry, bo);
    for (const auto& r : results) {
      out << rep_name << " " << mode << " " << r.cut_id << ": " << r.outcome.describe() << ", " << r.llm_calls
          << " LLM calls";
      if (r.error) out << " (" << *r.error << ")";
      out << "\n";
    }
    all.insert(all.end(), results.begin(), results.end());
  }
  return all;
}

nlohmann::ordered_json cmd_report(const fs::path& run_dir, const ReportOptions& options, std::ostream& out) {
  auto metrics = build_metrics(load_run(run_dir), options);
  write_report(metrics, run_dir / "report");
  out << render_tables(metrics);
  return metrics;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mock-informed unit test generation for mocked components"};
  app.require_subcommand(1);

  std::string config_path, run_dir, kills, selector, mode, denominator = "universe";
  int repetitions = 0;

  auto add_config = [&](CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("-c,--config", config_path, "Run configuration (JSON)");
    if (required) o->required();
  };
  auto* scan = app.add_subcommand("scan", "Find mocked project types and select CUTs");
  add_config(scan, true);
  scan->add_option("--run-dir", run_dir, "New run directory (default: a timestamped one)");

  auto* extract = app.add_subcommand("extract", "Extract stubbings and verifications per target");
  add_config(extract, true);
  extract->add_option("--run-dir", run_dir, "Run directory from scan")->required();

  auto* generate = app.add_subcommand("generate", "Generate, compile and repair tests per target");
  add_config(generate, true);
  generate->add_option("--run-dir", run_dir, "Run directory from scan")->required();

  auto* report = app.add_subcommand("report", "Compute metrics over a finished run");
  add_config(report, false);
  report->add_option("--run-dir", run_dir, "Run directory")->required();

  auto* e2e = app.add_subcommand("e2e", "scan, generate and report in one new run directory");
  add_config(e2e, true);
  e2e->add_option("--run-dir", run_dir, "New run directory (default: a timestamped one)");

  for (auto* cmd : {generate, e2e}) {
    cmd->add_option("--cut", selector, "Only targets matching this glob");
    cmd->add_option("--mode", mode, "mock_informed or baseline")->check(CLI::IsMember({"mock_informed", "baseline"}));
    cmd->add_option("--repetitions", repetitions, "Repetitions per target")->check(CLI::PositiveNumber);
  }
  for (auto* cmd : {report, e2e}) {
    cmd->add_option("--kills", kills, "Directory of <cut>/<technique>.kills.json files");
    cmd->add_option("--denominator", denominator, "Uniqueness denominator")->check(CLI::IsMember({"universe", "union"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::optional<RunConfig> config;
    if (!config_path.empty()) config = load_run_config(config_path);

    GenerateOptions gen;
    gen.selector = selector;
    if (!mode.empty()) gen.mode = mode;
    if (repetitions > 0) gen.repetitions = repetitions;

    ReportOptions ro;
    ro.denominator = denominator == "union" ? UniqueDenominator::UnionOfMembers : UniqueDenominator::Universe;
    if (!kills.empty()) {
      ro.kill_sets = fs::path(kills);
    } else if (config && !config->paths.kill_sets.empty()) {
      ro.kill_sets = config->resolve(config->paths.kill_sets);
    }

    std::optional<fs::path> explicit_dir;
    if (!run_dir.empty()) explicit_dir = fs::path(run_dir);

    if (scan->parsed()) {
      auto dir = create_run_dir(config->resolve(config->paths.run_dir), explicit_dir);
      cmd_scan(*config, dir, out);
      out << "run directory: " << dir.string() << "\n";
    } else if (extract->parsed()) {
      cmd_extract(*config, run_dir, out);
    } else if (generate->parsed()) {
      cmd_generate(*config, run_dir, gen, out);
    } else if (report->parsed()) {
      cmd_report(run_dir, ro, out);
    } else if (e2e->parsed()) {
      auto dir = create_run_dir(config->resolve(config->paths.run_dir), explicit_dir);
      out << "run directory: " << dir.string() << "\n";
      if (cmd_scan(*config, dir, out).empty()) {
        out << "warning: nothing selected\n";
        return 0;
      }
      cmd_generate(*config, dir, gen, out);
      cmd_report(dir, ro, out);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stubforge::cli
