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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/scanner.hpp"

namespace stubforge {

/// One experiment's settings, read from a JSON file. Relative paths are kept
/// as written and resolved against the file's directory on use.
struct RunConfig {
  struct Project {
    std::string root;
    nlohmann::json build_tool = "maven";  // "maven", "gradle", "scripted" or a command-set object
    std::vector<std::string> test_roots{"src/test/java"};
  } project;

  struct Filters {
    std::vector<std::string> include;  // name globs; empty keeps everything
    std::vector<std::string> exclude;
    CutCriteria criteria;
  } filters;

  struct Llm {
    std::string provider = "openai";
    std::string model = "gpt-5-mini";
    std::size_t budget = 32000;  // prompt token limit
    std::string mode = "mock_informed";
    int max_attempts = 3;        // transport retries per call
    double requests_per_minute = 0;
  } llm;

  struct Limits {
    int compile_retries = 5;
    int runtime_retries = 5;
    int parallelism = 1;
  } limits;

  struct Paths {
    std::string run_dir = "runs";    // parent of the timestamped run directories
    std::string templates;           // empty: the bundled data directory
    std::string prices;
    std::string dialect;
    std::string kill_sets;           // optional <cut>/<technique>.kills.json tree
    std::string scripted_replies;    // replies for the "scripted" provider
    std::string scripted_toolchain;  // scenarios for the "scripted" build tool
  } paths;

  int repetitions = 1;

  std::filesystem::path base_dir;  // not serialized

  /// Absolute form of a configured path; empty stays empty.
  std::filesystem::path resolve(const std::string& p) const;
  /// Throws ConfigError on an out-of-range value or unknown mode.
  void validate() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file);
nlohmann::ordered_json to_json(const RunConfig& c);

bool is_valid_mode(std::string_view mode);

/// fnmatch-style glob over a qualified name.
bool name_matches(std::string_view glob, std::string_view name);
/// Include globs (all when empty) minus exclude globs.
bool selected_by(const RunConfig::Filters& filters, std::string_view name);

}  // namespace stubforge
