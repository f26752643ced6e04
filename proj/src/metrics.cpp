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

#include "stubforge/metrics.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace stubforge {

namespace fs = std::filesystem;

QualitySummary summarize_quality(std::vector<double> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptySample, "no scores to summarize");
  std::sort(scores.begin(), scores.end());
  QualitySummary q;
  q.n = scores.size();
  q.min = scores.front();
  q.max = scores.back();
  std::size_t mid = q.n / 2;
  q.med = q.n % 2 ? scores[mid] : (scores[mid - 1] + scores[mid]) / 2.0;
  if (q.n > 1) {
    double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(q.n);
    double ss = 0;
    for (double x : scores) ss += (x - mean) * (x - mean);
    q.stdev = std::sqrt(ss / static_cast<double>(q.n - 1));
  }
  return q;
}

std::vector<QualitySummary> summarize_quality_batch(const std::vector<std::vector<double>>& samples, Execution exec) {
  std::vector<QualitySummary> out(samples.size());
  parallel_for(samples.size(), exec, [&](std::size_t i) { out[i] = summarize_quality(samples[i]); });
  return out;
}

CompilationRates compilation_rates(const std::vector<CutRunResult>& results) {
  if (results.empty()) throw Error(ErrorCode::EmptySample, "no results for compilation rates");
  std::size_t first = 0, ever = 0;
  for (const auto& r : results) {
    first += r.outcome.compile == CompileOutcome::CompiledFirstTry;
    ever += r.compiled();
  }
  double n = static_cast<double>(results.size());
  return {static_cast<double>(first) / n * 100.0, static_cast<double>(ever) / n * 100.0};
}

RunMetrics compute_run_metrics(const std::vector<CutRunResult>& results) {
  RunMetrics m;
  auto rates = compilation_rates(results);
  m.results = results.size();
  m.cft_pct = rates.cft_pct;
  m.cev_pct = rates.cev_pct;
  double tests = 0;
  std::vector<double> mutation, coverage;
  for (const auto& r : results) {
    tests += r.tests_generated;
    if (r.outcome.execution) {
      m.tests_executed += static_cast<std::size_t>(r.outcome.tests_executed);
      m.tests_passed += static_cast<std::size_t>(r.outcome.tests_passed);
    }
    QualityPair q{r.cut_id, std::nullopt, std::nullopt};
    if (r.mutation) mutation.push_back(*(q.mutation_score = r.mutation->score() * 100.0));
    if (r.coverage) coverage.push_back(*(q.line_coverage = r.coverage->ratio() * 100.0));
    m.per_cut.push_back(std::move(q));
  }
  m.tst = tests / static_cast<double>(results.size());
  if (m.tests_executed > 0)
    m.tsp_pct = static_cast<double>(m.tests_passed) / static_cast<double>(m.tests_executed) * 100.0;
  if (!mutation.empty()) m.mutation = summarize_quality(mutation);
  if (!coverage.empty()) m.coverage = summarize_quality(coverage);
  return m;
}

std::map<std::string, UniqueShare> unique_killed(const TechniqueKillMap& map, UniqueDenominator denominator) {
  if (map.kills.size() < 2) throw Error(ErrorCode::ContractBreach, "uniqueness needs at least two techniques");
  std::map<std::string, int> reached_by;
  for (const auto& [tech, ids] : map.kills)
    for (const auto& id : ids) {
      if (!map.universe.count(id))
        throw Error(ErrorCode::InvariantViolation, tech + " reaches '" + id + "' outside the universe");
      ++reached_by[id];
    }
  double denom = denominator == UniqueDenominator::Universe ? static_cast<double>(map.universe.size())
                                                           : static_cast<double>(reached_by.size());
  std::map<std::string, UniqueShare> out;
  for (const auto& [tech, ids] : map.kills) {
    UniqueShare s;
    for (const auto& id : ids)
      if (reached_by[id] == 1) s.ids.insert(id);
    s.pct = denom > 0 ? static_cast<double>(s.ids.size()) / denom * 100.0 : 0.0;
    out.emplace(tech, std::move(s));
  }
  return out;
}

std::vector<std::map<std::string, UniqueShare>> unique_killed_batch(const std::vector<TechniqueKillMap>& maps,
                                                                    UniqueDenominator denominator, Execution exec) {
  std::vector<std::map<std::string, UniqueShare>> out(maps.size());
  parallel_for(maps.size(), exec, [&](std::size_t i) { out[i] = unique_killed(maps[i], denominator); });
  return out;
}

double dominance_rate(const std::vector<std::pair<double, double>>& per_cut) {
  if (per_cut.empty()) throw Error(ErrorCode::EmptySample, "no CUTs to compare");
  auto wins = std::count_if(per_cut.begin(), per_cut.end(), [](const auto& p) { return p.first > p.second; });
  return static_cast<double>(wins) / static_cast<double>(per_cut.size()) * 100.0;
}

StatTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(ErrorCode::EmptySample, "the rank test needs at least two groups");
  StatTestResult r;
  r.degrees_of_freedom = static_cast<int>(groups.size()) - 1;
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw Error(ErrorCode::EmptySample, "group " + std::to_string(g) + " is empty");
    r.group_sizes.push_back(groups[g].size());
    for (double v : groups[g]) all.push_back({v, g});
  }
  std::sort(all.begin(), all.end());
  const double n = static_cast<double>(all.size());
  std::vector<double> rank_sum(groups.size(), 0.0);
  double ties = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    double t = static_cast<double>(j - i);
    double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank_sum[all[k].second] += mid;
    ties += t * t * t - t;
    i = j;
  }
  double correction = 1.0 - ties / (n * n * n - n);
  if (correction <= 0) return r;  // every value equal
  double s = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) s += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
  double h = (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / correction;
  r.h_statistic = std::max(0.0, h);
  r.p_value = boost::math::gamma_q(r.degrees_of_freedom / 2.0, r.h_statistic / 2.0);
  return r;
}

std::vector<StatTestResult> kruskal_wallis_batch(const std::vector<std::vector<std::vector<double>>>& tests,
                                                 Execution exec) {
  std::vector<StatTestResult> out(tests.size());
  parallel_for(tests.size(), exec, [&](std::size_t i) { out[i] = kruskal_wallis(tests[i]); });
  return out;
}

std::vector<CostRow> cost_table(const std::vector<LedgerEntry>& ledger) {
  if (ledger.empty()) throw Error(ErrorCode::EmptyLedger, "no ledger entries");
  struct Run {
    std::int64_t in = 0, out = 0;
    Usd cost;
  };
  using GroupKey = std::tuple<std::string, std::string, std::string>;
  std::map<GroupKey, std::map<std::pair<std::string, std::string>, Run>> groups;
  for (const auto& e : ledger) {
    Run& run = groups[{e.provider_id, e.model_id, e.mode}][{e.run_id, e.cut_id}];
    run.in += e.completion.input_tokens;
    run.out += e.completion.output_tokens;
    run.cost += e.cost_usd;
  }
  std::vector<CostRow> rows;
  for (const auto& [key, runs] : groups) {
    CostRow row;
    std::tie(row.provider_id, row.model_id, row.mode) = key;
    row.runs = runs.size();
    std::int64_t in = 0, out = 0;
    for (const auto& [id, run] : runs) {
      in += run.in;
      out += run.out;
      row.total_cost += run.cost;
    }
    auto n = static_cast<std::int64_t>(row.runs);
    row.mean_input_tokens = static_cast<double>(in) / static_cast<double>(n);
    row.mean_output_tokens = static_cast<double>(out) / static_cast<double>(n);
    row.mean_cost = Usd::from_pico((row.total_cost.pico() + n / 2) / n);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::set<std::string> id_list(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedReport, "cannot read " + file.string());
  try {
    auto j = nlohmann::json::parse(in);
    std::set<std::string> ids;
    for (const auto& v : j) ids.insert(v.is_string() ? v.get<std::string>() : v.dump());
    if (!j.is_array()) throw Error(ErrorCode::MalformedReport, file.string() + " must hold a JSON list");
    return ids;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedReport, file.string() + ": " + e.what());
  }
}

constexpr std::string_view kKillsSuffix = ".kills.json";

}  // namespace

std::vector<CutKillSets> load_kill_sets(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MalformedReport, "no kill-set directory " + dir.string());
  std::vector<fs::path> cuts;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) cuts.push_back(e.path());
  std::sort(cuts.begin(), cuts.end());
  std::vector<CutKillSets> out;
  for (const auto& c : cuts) {
    CutKillSets s;
    s.cut_id = c.filename().string();
    if (!fs::is_regular_file(c / "universe.json"))
      throw Error(ErrorCode::MalformedReport, s.cut_id + " has no universe.json");
    s.map.universe = id_list(c / "universe.json");
    for (const auto& e : fs::directory_iterator(c)) {
      std::string name = e.path().filename().string();
      if (name.size() <= kKillsSuffix.size() || name.compare(name.size() - kKillsSuffix.size(), kKillsSuffix.size(), kKillsSuffix) != 0)
        continue;
      auto ids = id_list(e.path());
      for (const auto& id : ids)
        if (!s.map.universe.count(id))
          throw Error(ErrorCode::MalformedReport, e.path().string() + ": '" + id + "' is not in universe.json");
      s.map.kills[name.substr(0, name.size() - kKillsSuffix.size())] = std::move(ids);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void merge_run_kills(std::vector<CutKillSets>& sets, const std::vector<CutRunResult>& results,
                     const std::string& technique) {
  for (const auto& r : results) {
    if (!r.mutation) continue;
    auto it = std::find_if(sets.begin(), sets.end(), [&](const CutKillSets& s) { return s.cut_id == r.cut_id; });
    if (it == sets.end()) {
      sets.push_back({r.cut_id, {}});
      it = std::prev(sets.end());
    }
    auto& kills = it->map.kills[technique];
    for (const auto& m : r.mutation->mutants) {
      it->map.universe.insert(m.id);
      if (m.status == MutantStatus::Killed) kills.insert(m.id);
    }
  }
}

UniquenessTable uniqueness_table(const std::vector<CutKillSets>& sets, UniqueDenominator denominator) {
  UniquenessTable t;
  std::set<std::string> names;
  for (const auto& s : sets)
    for (const auto& [tech, ids] : s.map.kills) names.insert(tech);
  t.techniques.assign(names.begin(), names.end());
  std::vector<TechniqueKillMap> comparable;
  for (const auto& s : sets)
    if (s.map.kills.size() >= 2) comparable.push_back(s.map);
  auto shares = unique_killed_batch(comparable, denominator, Execution::Serial);
  std::size_t k = 0;
  for (const auto& s : sets) {
    std::map<std::string, std::optional<double>> row;
    for (const auto& name : t.techniques) row[name] = std::nullopt;
    if (s.map.kills.size() >= 2) {
      for (const auto& [tech, share] : shares[k]) row[tech] = share.pct;
      ++k;
    }
    t.rows.push_back({s.cut_id, std::move(row)});
  }
  return t;
}

std::optional<double> dominance_between(const UniquenessTable& table, const std::string& reference,
                                        const std::string& other) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [cut, row] : table.rows) {
    auto a = row.find(reference), b = row.find(other);
    if (a != row.end() && b != row.end() && a->second && b->second) pairs.push_back({*a->second, *b->second});
  }
  if (pairs.empty()) return std::nullopt;
  return dominance_rate(pairs);
}

std::string pct2(double v) {
  char buf[64];
  double r = std::round(v * 100.0) / 100.0;
  if (r == 0) r = 0;  // no "-0.00"
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

}  // namespace stubforge
