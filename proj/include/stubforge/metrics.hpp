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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/llm_gateway.hpp"
#include "stubforge/parallel.hpp"
#include "stubforge/repair_engine.hpp"

namespace stubforge {

struct QualitySummary {
  double min = 0;
  double med = 0;
  double max = 0;
  double stdev = 0;  // sample (n - 1); 0 for a single value
  std::size_t n = 0;
};

/// Throws EmptySample.
QualitySummary summarize_quality(std::vector<double> scores);
/// One summary per sample; EmptySample if any sample is empty.
std::vector<QualitySummary> summarize_quality_batch(const std::vector<std::vector<double>>& samples,
                                                    Execution exec = Execution::Parallel);

struct CompilationRates {
  double cft_pct = 0;
  double cev_pct = 0;
};

/// Per generated test file. Throws EmptySample.
CompilationRates compilation_rates(const std::vector<CutRunResult>& results);

/// Per-CUT quality facts in percent; absent when the suite was not analyzed.
struct QualityPair {
  std::string cut_id;
  std::optional<double> mutation_score;
  std::optional<double> line_coverage;
};

struct RunMetrics {
  std::size_t results = 0;
  double tst = 0;  // mean test methods per CUT run
  double cft_pct = 0;
  double cev_pct = 0;
  std::optional<double> tsp_pct;  // passed / executed over every executed suite
  std::size_t tests_executed = 0;
  std::size_t tests_passed = 0;
  std::optional<QualitySummary> mutation;
  std::optional<QualitySummary> coverage;
  std::vector<QualityPair> per_cut;
};

/// Pools every result (CUT x repetition). Throws EmptySample.
RunMetrics compute_run_metrics(const std::vector<CutRunResult>& results);

/// Which set the uniqueness percentage is taken over.
enum class UniqueDenominator { Universe, UnionOfMembers };

/// Technique name to the ids it reached (mutants killed or lines covered),
/// plus every id that exists for the CUT.
struct TechniqueKillMap {
  std::map<std::string, std::set<std::string>> kills;
  std::set<std::string> universe;
};

struct UniqueShare {
  std::set<std::string> ids;
  double pct = 0;
};

/// kills(t) minus the union of every other technique's kills. Needs at
/// least two techniques (ContractBreach) whose ids all lie in the universe
/// (InvariantViolation).
std::map<std::string, UniqueShare> unique_killed(const TechniqueKillMap& map,
                                                 UniqueDenominator denominator = UniqueDenominator::Universe);
std::vector<std::map<std::string, UniqueShare>> unique_killed_batch(
    const std::vector<TechniqueKillMap>& maps, UniqueDenominator denominator = UniqueDenominator::Universe,
    Execution exec = Execution::Parallel);

/// Percentage of pairs with a > b strictly. Throws EmptySample.
double dominance_rate(const std::vector<std::pair<double, double>>& per_cut);

struct StatTestResult {
  double h_statistic = 0;
  double p_value = 1;
  int degrees_of_freedom = 0;
  std::vector<std::size_t> group_sizes;
};

/// Rank test with mid-ranks and tie correction; p from the chi-square upper
/// tail. All-equal input gives H = 0, p = 1. Throws EmptySample with fewer
/// than two groups or an empty group.
StatTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);
std::vector<StatTestResult> kruskal_wallis_batch(const std::vector<std::vector<std::vector<double>>>& tests,
                                                 Execution exec = Execution::Parallel);

struct CostRow {
  std::string provider_id;
  std::string model_id;
  std::string mode;
  std::size_t runs = 0;  // distinct (run_id, cut_id) pairs
  Usd mean_cost;         // rounded to the nearest 1e-12 USD
  double mean_input_tokens = 0;
  double mean_output_tokens = 0;
  Usd total_cost;
};

/// Groups by model and mode, sums each CUT run's calls, and averages over
/// runs. Rows sorted by provider, model, mode. Throws EmptyLedger.
std::vector<CostRow> cost_table(const std::vector<LedgerEntry>& ledger);

/// Per-CUT kill sets for several techniques, as read from
/// <dir>/<cut>/universe.json and <dir>/<cut>/<technique>.kills.json.
struct CutKillSets {
  std::string cut_id;
  TechniqueKillMap map;
};

/// Throws MalformedReport.
std::vector<CutKillSets> load_kill_sets(const std::filesystem::path& dir);

/// Adds the mutants killed by the pipeline's final suites as `technique`.
/// A CUT seen only in the results gets its universe from the report.
void merge_run_kills(std::vector<CutKillSets>& sets, const std::vector<CutRunResult>& results,
                     const std::string& technique);

struct UniquenessTable {
  std::vector<std::string> techniques;
  // cut_id -> technique -> unique percentage, absent when the technique has
  // no kill set for that CUT.
  std::vector<std::pair<std::string, std::map<std::string, std::optional<double>>>> rows;
};

UniquenessTable uniqueness_table(const std::vector<CutKillSets>& sets,
                                 UniqueDenominator denominator = UniqueDenominator::Universe);

/// dominance_rate of `reference` over `other` on CUTs where both appear.
std::optional<double> dominance_between(const UniquenessTable& table, const std::string& reference,
                                        const std::string& other);

/// Percent rendered with two decimals ("24.56").
std::string pct2(double v);

}  // namespace stubforge
