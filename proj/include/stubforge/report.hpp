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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/metrics.hpp"

namespace stubforge {

/// A result.json found under a run directory. `repetition` is the first
/// path component below the run directory ("rep-01"), empty when flat.
struct ResultRecord {
  std::string repetition;
  std::string path;  // relative to the run directory, generic separators
  CutRunResult result;
};

struct RunData {
  std::vector<ResultRecord> results;  // sorted by path
  std::vector<LedgerEntry> ledger;
};

/// Reads every result.json and ledger.jsonl under `run_dir`, skipping the
/// workspaces/ and report/ subtrees. Throws EmptyRun when neither exists,
/// MalformedReport on unreadable files.
RunData load_run(const std::filesystem::path& run_dir);

struct ReportOptions {
  UniqueDenominator denominator = UniqueDenominator::Universe;
  std::string reference_technique = "mock_informed";
  std::optional<std::filesystem::path> kill_sets;  // external <cut>/<technique>.kills.json tree
};

/// Every metric as a deterministic document: floats rounded to 1e-6 and
/// nothing time- or host-dependent.
nlohmann::ordered_json build_metrics(const RunData& run, const ReportOptions& options = {});

/// Fixed-width text tables for quality, uniqueness and cost.
std::string render_tables(const nlohmann::ordered_json& metrics);

/// Writes <out_dir>/metrics.json and <out_dir>/tables.txt.
void write_report(const nlohmann::ordered_json& metrics, const std::filesystem::path& out_dir);

}  // namespace stubforge
