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

#include "stubforge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace stubforge {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

double r6(double x) {
  double r = std::round(x * 1e6) / 1e6;
  return r == 0 ? 0 : r;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(r6(*v)) : ordered_json(nullptr); }

ordered_json summary_json(const std::optional<QualitySummary>& q) {
  if (!q) return nullptr;
  return {{"min", r6(q->min)}, {"med", r6(q->med)}, {"max", r6(q->max)}, {"stdev", r6(q->stdev)}, {"n", q->n}};
}

std::string model_of(const CutRunResult& r) { return r.ledger_slice.empty() ? "unknown" : r.ledger_slice.front().model_id; }

}  // namespace

RunData load_run(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw Error(ErrorCode::EmptyRun, "no run directory " + run_dir.string());
  RunData run;
  std::vector<fs::path> found;
  for (auto it = fs::recursive_directory_iterator(run_dir); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory() && it.depth() == 0) {
      auto name = it->path().filename();
      if (name == "workspaces" || name == "report") it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && it->path().filename() == "result.json") found.push_back(it->path());
  }
  for (const auto& p : found) {
    ResultRecord rec;
    fs::path rel = fs::relative(p, run_dir);
    rec.path = rel.generic_string();
    std::string first = rel.begin()->string();
    if (first.rfind("rep-", 0) == 0) rec.repetition = first;
    std::ifstream in(p, std::ios::binary);
    try {
      rec.result = cut_run_result_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedReport, rec.path + ": " + e.what());
    }
    run.results.push_back(std::move(rec));
  }
  std::sort(run.results.begin(), run.results.end(),
            [](const ResultRecord& a, const ResultRecord& b) { return a.path < b.path; });
  if (fs::is_regular_file(run_dir / "ledger.jsonl")) run.ledger = CostLedger::read_jsonl(run_dir / "ledger.jsonl");
  if (run.results.empty() && run.ledger.empty())
    throw Error(ErrorCode::EmptyRun, "no result.json or ledger.jsonl under " + run_dir.string());
  return run;
}

ordered_json build_metrics(const RunData& run, const ReportOptions& options) {
  ordered_json out;
  out["results"] = run.results.size();
  out["ledger_entries"] = run.ledger.size();

  // (model, mode) -> repetition -> results
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<CutRunResult>>> groups;
  for (const auto& rec : run.results) groups[{model_of(rec.result), rec.result.mode}][rec.repetition].push_back(rec.result);

  if (groups.empty()) {
    out["quality"] = nullptr;
  } else {
    ordered_json pooled = ordered_json::array(), per_rep = ordered_json::array(), per_cut = ordered_json::array();
    for (const auto& [key, reps] : groups) {
      std::vector<CutRunResult> all;
      for (const auto& [rep, rs] : reps) all.insert(all.end(), rs.begin(), rs.end());
      auto m = compute_run_metrics(all);
      pooled.push_back({{"model", key.first},
                        {"mode", key.second},
                        {"results", m.results},
                        {"tst", r6(m.tst)},
                        {"cft_pct", r6(m.cft_pct)},
                        {"cev_pct", r6(m.cev_pct)},
                        {"tsp_pct", opt(m.tsp_pct)},
                        {"tests_executed", m.tests_executed},
                        {"tests_passed", m.tests_passed},
                        {"mutation_score", summary_json(m.mutation)},
                        {"line_coverage", summary_json(m.coverage)}});

      double tst = 0, cft = 0, cev = 0, tsp = 0;
      std::size_t with_tsp = 0;
      for (const auto& [rep, rs] : reps) {
        auto rm = compute_run_metrics(rs);
        tst += rm.tst;
        cft += rm.cft_pct;
        cev += rm.cev_pct;
        if (rm.tsp_pct) {
          tsp += *rm.tsp_pct;
          ++with_tsp;
        }
      }
      double n = static_cast<double>(reps.size());
      per_rep.push_back({{"model", key.first},
                         {"mode", key.second},
                         {"repetitions", reps.size()},
                         {"tst", r6(tst / n)},
                         {"cft_pct", r6(cft / n)},
                         {"cev_pct", r6(cev / n)},
                         {"tsp_pct", with_tsp ? ordered_json(r6(tsp / static_cast<double>(with_tsp))) : ordered_json(nullptr)}});
    }
    for (const auto& rec : run.results) {
      const auto& r = rec.result;
      per_cut.push_back({{"path", rec.path},
                         {"repetition", rec.repetition},
                         {"mode", r.mode},
                         {"cut_id", r.cut_id},
                         {"outcome", r.outcome.describe()},
                         {"llm_calls", r.llm_calls},
                         {"tests_generated", r.tests_generated},
                         {"mutation_score", r.mutation ? ordered_json(r6(r.mutation->score() * 100)) : ordered_json(nullptr)},
                         {"line_coverage", r.coverage ? ordered_json(r6(r.coverage->ratio() * 100)) : ordered_json(nullptr)},
                         {"error", r.error ? ordered_json(*r.error) : ordered_json(nullptr)}});
    }
    out["quality"] = {{"pooled", pooled}, {"per_repetition_mean", per_rep}, {"per_cut", per_cut}};

    // Modes compared within each model.
    ordered_json tests = ordered_json::array();
    std::map<std::string, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>> by_model;
    for (const auto& rec : run.results) {
      auto& [ms, lc] = by_model[model_of(rec.result)][rec.result.mode];
      if (rec.result.mutation) ms.push_back(rec.result.mutation->score() * 100);
      if (rec.result.coverage) lc.push_back(rec.result.coverage->ratio() * 100);
    }
    for (const auto& [model, modes] : by_model) {
      for (int metric = 0; metric < 2; ++metric) {
        std::vector<std::vector<double>> samples;
        std::vector<std::string> names;
        for (const auto& [mode, s] : modes) {
          const auto& v = metric == 0 ? s.first : s.second;
          if (v.empty()) continue;
          samples.push_back(v);
          names.push_back(mode);
        }
        if (samples.size() < 2) continue;
        auto kw = kruskal_wallis(samples);
        tests.push_back({{"model", model},
                         {"metric", metric == 0 ? "mutation_score" : "line_coverage"},
                         {"groups", names},
                         {"group_sizes", kw.group_sizes},
                         {"h", r6(kw.h_statistic)},
                         {"p", r6(kw.p_value)},
                         {"df", kw.degrees_of_freedom}});
      }
    }
    out["rank_tests"] = tests;
  }

  std::vector<CutKillSets> sets;
  if (options.kill_sets) sets = load_kill_sets(*options.kill_sets);
  std::map<std::string, std::vector<CutRunResult>> by_mode;
  for (const auto& rec : run.results) by_mode[rec.result.mode].push_back(rec.result);
  for (const auto& [mode, rs] : by_mode) merge_run_kills(sets, rs, mode);
  bool comparable = std::any_of(sets.begin(), sets.end(), [](const CutKillSets& s) { return s.map.kills.size() >= 2; });
  if (!comparable) {
    out["uniqueness"] = nullptr;
  } else {
    auto table = uniqueness_table(sets, options.denominator);
    ordered_json rows = ordered_json::array();
    for (const auto& [cut, cells] : table.rows) {
      ordered_json values;
      for (const auto& t : table.techniques) values[t] = opt(cells.at(t));
      rows.push_back({{"cut_id", cut}, {"unique_pct", values}});
    }
    ordered_json dominance;
    for (const auto& t : table.techniques)
      if (t != options.reference_technique) dominance[t] = opt(dominance_between(table, options.reference_technique, t));
    out["uniqueness"] = {{"denominator", options.denominator == UniqueDenominator::Universe ? "universe" : "union"},
                         {"reference", options.reference_technique},
                         {"techniques", table.techniques},
                         {"rows", rows},
                         {"dominance_pct", dominance.is_null() ? ordered_json::object() : dominance}};
  }

  if (run.ledger.empty()) {
    out["cost"] = nullptr;
  } else {
    ordered_json rows = ordered_json::array();
    for (const auto& c : cost_table(run.ledger))
      rows.push_back({{"provider", c.provider_id},
                      {"model", c.model_id},
                      {"mode", c.mode},
                      {"runs", c.runs},
                      {"mean_cost_usd", c.mean_cost.exact()},
                      {"mean_input_tokens", r6(c.mean_input_tokens)},
                      {"mean_output_tokens", r6(c.mean_output_tokens)},
                      {"total_cost_usd", c.total_cost.exact()}});
    out["cost"] = rows;
  }
  return out;
}

namespace {

std::string fixed(const ordered_json& v, int places) {
  if (v.is_null()) return "--";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v.get<double>());
  return buf;
}

std::string spread(const ordered_json& s) {
  if (s.is_null()) return "--";
  return fixed(s["min"], 0) + "/" + fixed(s["med"], 0) + "/" + fixed(s["max"], 0) + "/" + fixed(s["stdev"], 1);
}

// The first `left` columns are left-aligned, the rest right-aligned.
void table(std::ostringstream& os, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
           std::size_t left = 2) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::string pad(w[i] - cells[i].size(), ' ');
      if (i) os << "  ";
      os << (i < left ? cells[i] + pad : pad + cells[i]);
    }
    os << "\n";
  };
  line(header);
  std::size_t total = 0;
  for (auto x : w) total += x;
  os << std::string(total + 2 * (w.size() - 1), '-') << "\n";
  for (const auto& r : rows) line(r);
}

}  // namespace

std::string render_tables(const ordered_json& m) {
  std::ostringstream os;
  os << "Test suite quality (pooled over CUT x repetition)\n";
  if (m["quality"].is_null()) {
    os << "  absent: no result.json in this run\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : m["quality"]["pooled"])
      rows.push_back({r["model"].get<std::string>(), r["mode"].get<std::string>(), std::to_string(r["results"].get<int>()),
                      fixed(r["tst"], 1), fixed(r["cft_pct"], 0), fixed(r["cev_pct"], 0), fixed(r["tsp_pct"], 1),
                      spread(r["mutation_score"]), spread(r["line_coverage"])});
    table(os, {"model", "mode", "n", "TST", "CFT", "CEV", "TSP", "MS min/med/max/sd", "LC min/med/max/sd"}, rows);
    os << "\nPer-repetition means\n";
    rows.clear();
    for (const auto& r : m["quality"]["per_repetition_mean"])
      rows.push_back({r["model"].get<std::string>(), r["mode"].get<std::string>(),
                      std::to_string(r["repetitions"].get<int>()), fixed(r["tst"], 1), fixed(r["cft_pct"], 1),
                      fixed(r["cev_pct"], 1), fixed(r["tsp_pct"], 1)});
    table(os, {"model", "mode", "reps", "TST", "CFT", "CEV", "TSP"}, rows);
    if (!m["rank_tests"].empty()) {
      os << "\nKruskal-Wallis across modes\n";
      rows.clear();
      for (const auto& t : m["rank_tests"])
        rows.push_back({t["model"].get<std::string>(), t["metric"].get<std::string>(), fixed(t["h"], 2), fixed(t["p"], 3),
                        std::to_string(t["df"].get<int>())});
      table(os, {"model", "metric", "H", "p", "df"}, rows);
    }
  }

  os << "\nUnique mutations killed (%)\n";
  if (m["uniqueness"].is_null()) {
    os << "  absent: no CUT has kill sets from two techniques\n";
  } else {
    const auto& u = m["uniqueness"];
    std::vector<std::string> header{"CUT"};
    std::vector<std::string> techs = u["techniques"];
    header.insert(header.end(), techs.begin(), techs.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : u["rows"]) {
      std::vector<std::string> row{r["cut_id"].get<std::string>()};
      for (const auto& t : techs) row.push_back(r["unique_pct"][t].is_null() ? "--" : pct2(r["unique_pct"][t].get<double>()));
      rows.push_back(row);
    }
    table(os, header, rows, 1);
    for (const auto& [t, v] : u["dominance_pct"].items())
      os << u["reference"].get<std::string>() << " strictly higher than " << t << ": "
         << (v.is_null() ? "--" : fixed(v, 0) + "% of CUTs") << "\n";
  }

  os << "\nAverage generation cost per CUT run\n";
  if (m["cost"].is_null()) {
    os << "  absent: no ledger\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : m["cost"])
      rows.push_back({c["model"].get<std::string>(), c["mode"].get<std::string>(), std::to_string(c["runs"].get<int>()),
                      "$" + Usd::parse(c["mean_cost_usd"].get<std::string>()).format(4), fixed(c["mean_input_tokens"], 0),
                      fixed(c["mean_output_tokens"], 0)});
    table(os, {"model", "mode", "runs", "cost", "input tok", "output tok"}, rows);
  }
  return os.str();
}

void write_report(const ordered_json& metrics, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  auto put = [&](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
  };
  put(out_dir / "metrics.json", metrics.dump(2) + "\n");
  put(out_dir / "tables.txt", render_tables(metrics));
}

}  // namespace stubforge
