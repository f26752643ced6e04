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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/error.hpp"
#include "stubforge/report.hpp"
#include "stubforge/run_config.hpp"

namespace stubforge::cli {

/// 0 is success. Each error family has its own code: 2 usage, 10 scanner,
/// 11 extractor, 12 promptkit, 13 llm, 14 toolchain, 15 metrics, 16 config
/// and run directories, 1 anything else.
int exit_code_for(ErrorCode code);

/// Creates <parent>/<UTC timestamp>, or `explicit_dir` when given. Neither
/// may exist yet (RunDirExists).
std::filesystem::path create_run_dir(const std::filesystem::path& parent,
                                     const std::optional<std::filesystem::path>& explicit_dir);

/// Where the bundled templates, prices and dialect live when the config
/// leaves them empty.
std::filesystem::path default_data_dir();

/// Writes targets.json (and config.json) into `run_dir`.
std::vector<CandidateTarget> cmd_scan(const RunConfig& config, const std::filesystem::path& run_dir, std::ostream& out);

/// Writes extracts/<cut>.json for every target.
void cmd_extract(const RunConfig& config, const std::filesystem::path& run_dir, std::ostream& out);

struct GenerateOptions {
  std::string selector;                  // CUT glob; empty means all
  std::optional<std::string> mode;       // overrides llm.mode
  std::optional<int> repetitions;        // overrides the config
};

/// Runs the pipeline for every selected target and repetition into
/// <run_dir>/rep-NN/<mode>/. A failing CUT is recorded and never stops the
/// others.
std::vector<CutRunResult> cmd_generate(const RunConfig& config, const std::filesystem::path& run_dir,
                                       const GenerateOptions& options, std::ostream& out);

/// Writes <run_dir>/report/{metrics.json,tables.txt} and prints the tables.
nlohmann::ordered_json cmd_report(const std::filesystem::path& run_dir, const ReportOptions& options, std::ostream& out);

/// Entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stubforge::cli
