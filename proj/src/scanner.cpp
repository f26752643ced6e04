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

#include "stubforge/scanner.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stubforge/error.hpp"
#include "stubforge/java/parser.hpp"
#include "stubforge/mock_analysis.hpp"

namespace stubforge {

namespace fs = std::filesystem;
using java::Node;
using java::NodeKind;

bool ProductionUnit::declares(std::string_view method) const {
  return std::any_of(methods.begin(), methods.end(),
                     [&](const MethodSummary& m) { return m.name == method; });
}

const ProductionUnit* SourceIndex::find(std::string_view qualified_name) const {
  for (const auto& p : production_units)
    if (p.qualified_name == qualified_name) return &p;
  return nullptr;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool under_test_root(const std::string& rel, const ScanConfig& config) {
  for (const auto& r : config.test_roots) {
    std::string root = r;
    while (!root.empty() && root.back() == '/') root.pop_back();
    if (root.empty()) continue;
    if (rel.compare(0, root.size(), root) == 0 && rel.size() > root.size() &&
        rel[root.size()] == '/')
      return true;
    if (rel.find("/" + root + "/") != std::string::npos) return true;
  }
  return false;
}

bool has_test_method(const java::CompilationUnit& unit, const ScanConfig& config) {
  bool found = false;
  java::for_each_type(unit.types, [&](const java::TypeDecl& t) {
    for (const auto& m : t.methods)
      for (const auto& a : config.test_annotations)
        if (m.has_annotation(a)) found = true;
  });
  return found;
}

std::vector<std::string> list_java_files(const fs::path& root, const ScanConfig& config) {
  std::vector<std::string> files;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorCode::RootNotFound, root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    const auto& entry = *it;
    std::string name = entry.path().filename().string();
    if (entry.is_directory()) {
      if (std::find(config.excluded_dirs.begin(), config.excluded_dirs.end(), name) !=
          config.excluded_dirs.end())
        it.disable_recursion_pending();
      continue;
    }
    if (entry.is_regular_file() && entry.path().extension() == ".java")
      files.push_back(fs::relative(entry.path(), root).generic_string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

SourceIndex discover_test_files(const fs::path& root, const ScanConfig& config) {
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw Error(ErrorCode::RootNotFound, "project root not found: " + root.string());
  SourceIndex index;
  index.root = root;
  std::vector<std::string> files = list_java_files(root, config);

  struct Parsed {
    std::shared_ptr<const java::CompilationUnit> tree;
    std::string warning;
  };
  std::vector<Parsed> parsed(files.size());
  parallel_for(files.size(), config.execution, [&](std::size_t i) {
    try {
      auto unit = java::parse_compilation_unit(read_file(root / files[i]), files[i]);
      parsed[i].tree = std::make_shared<const java::CompilationUnit>(std::move(unit));
    } catch (const Error& e) {
      parsed[i].warning = files[i] + ": " + e.what();
    }
  });

  std::set<std::string> seen;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!parsed[i].tree) {
      index.warnings.push_back(parsed[i].warning);
      continue;
    }
    const auto& tree = parsed[i].tree;
    if (under_test_root(files[i], config) || has_test_method(*tree, config)) {
      index.test_units.push_back({files[i], tree});
      continue;
    }
    java::for_each_type(tree->types, [&](const java::TypeDecl& t) {
      if (!seen.insert(t.qualified_name).second) {
        index.warnings.push_back(files[i] + ": duplicate type " + t.qualified_name);
        return;
      }
      ProductionUnit p;
      p.qualified_name = t.qualified_name;
      p.path = files[i];
      p.loc = java::count_code_lines(*tree, t.span);
      for (const auto& m : t.methods) {
        if (m.is_constructor) continue;
        MethodSummary s;
        s.name = m.name;
        s.parameter_arity = static_cast<int>(m.parameters.size());
        s.cyclomatic_complexity = m.body ? compute_cyclomatic_complexity(*m.body) : 1;
        s.start_line = m.start_line;
        s.end_line = m.end_line;
        p.methods.push_back(std::move(s));
      }
      p.supertypes = t.extends;
      p.supertypes.insert(p.supertypes.end(), t.implements.begin(), t.implements.end());
      p.tree = tree;
      index.production_units.push_back(std::move(p));
    });
  }
  if (index.test_units.empty())
    throw Error(ErrorCode::NoTestFiles, "no parseable test files under " + root.string());
  return index;
}

std::vector<CandidateTarget> identify_mocked_targets(const SourceIndex& index,
                                                     const MockingDialect& dialect,
                                                     const ScanConfig& config) {
  TypeResolver resolver(index);
  std::vector<TestUnitAnalysis> analyses(index.test_units.size());
  parallel_for(index.test_units.size(), config.execution, [&](std::size_t i) {
    analyses[i] = analyze_test_unit(*index.test_units[i].tree, dialect, resolver, config);
  });

  struct Tally {
    std::set<std::string> tests;
    int stubbings = 0;
    int verifies = 0;
  };
  std::map<std::string, Tally> by_type;
  for (const auto& a : analyses) {
    for (const auto& op : a.operations) {
      Tally& t = by_type[op.mocked_type];
      t.tests.insert(op.test_id);
      if (op.kind == MockOpKind::Stubbing) {
        ++t.stubbings;
      } else {
        ++t.verifies;
      }
    }
  }
  std::vector<CandidateTarget> out;
  for (auto& [type, tally] : by_type) {
    CandidateTarget c;
    c.qualified_name = type;
    c.mocked_in_tests.assign(tally.tests.begin(), tally.tests.end());
    c.stubbing_count = tally.stubbings;
    c.verify_count = tally.verifies;
    c.project_owned = index.find(type) != nullptr;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CandidateTarget> filter_project_owned(std::vector<CandidateTarget> candidates,
                                                  const SourceIndex& index) {
  std::vector<CandidateTarget> out;
  for (auto& c : candidates) {
    if (!index.find(c.qualified_name)) continue;
    c.project_owned = true;
    out.push_back(std::move(c));
  }
  return out;
}

int compute_cyclomatic_complexity(const Node& method_body) {
  int decisions = 0;
  auto walk = [&](const Node& n, auto&& self) -> void {
    switch (n.kind) {
      case NodeKind::If:
      case NodeKind::For:
      case NodeKind::ForEach:
      case NodeKind::While:
      case NodeKind::DoWhile:
      case NodeKind::CaseLabel:
      case NodeKind::Catch:
        ++decisions;
        break;
      default:
        break;
    }
    decisions += n.ternary_count + n.short_circuit_count;
    for (const auto& c : n.children) self(c, self);
  };
  walk(method_body, walk);
  return 1 + decisions;
}

bool meets_criteria(int loc, int methods, int max_cc, int stubbings, int verifies,
                    const CutCriteria& criteria) {
  return loc >= criteria.loc && methods >= criteria.methods && max_cc >= criteria.cc &&
         stubbings + verifies >= 1;
}

std::optional<CutProfile> profile_candidate(const CandidateTarget& candidate,
                                            const SourceIndex& index) {
  const ProductionUnit* unit = index.find(candidate.qualified_name);
  if (!unit) return std::nullopt;
  CutProfile p;
  p.target = candidate;
  p.target.project_owned = true;
  p.source_path = unit->path;
  p.loc = unit->loc;
  p.method_count = static_cast<int>(unit->methods.size());
  for (const auto& m : unit->methods) p.max_cc = std::max(p.max_cc, m.cyclomatic_complexity);
  p.source_text = unit->tree->source;
  return p;
}

std::vector<CutProfile> select_cuts(const std::vector<CandidateTarget>& candidates,
                                    const SourceIndex& index, const CutCriteria& criteria) {
  if (criteria.loc <= 0 || criteria.methods <= 0 || criteria.cc <= 0)
    throw Error(ErrorCode::ConfigError, "CUT thresholds must be positive");
  std::vector<CutProfile> out;
  for (const auto& c : candidates) {
    auto p = profile_candidate(c, index);
    if (!p) continue;
    if (meets_criteria(p->loc, p->method_count, p->max_cc, c.stubbing_count, c.verify_count,
                       criteria))
      out.push_back(std::move(*p));
  }
  return out;
}

nlohmann::ordered_json to_json(const CandidateTarget& target) {
  nlohmann::ordered_json j;
  j["qualified_name"] = target.qualified_name;
  j["mocked_in_tests"] = target.mocked_in_tests;
  j["stubbing_count"] = target.stubbing_count;
  j["verify_count"] = target.verify_count;
  j["project_owned"] = target.project_owned;
  return j;
}

CandidateTarget candidate_from_json(const nlohmann::json& j) {
  CandidateTarget c;
  try {
    c.qualified_name = j.at("qualified_name").get<std::string>();
    c.mocked_in_tests = j.at("mocked_in_tests").get<std::vector<std::string>>();
    c.stubbing_count = j.at("stubbing_count").get<int>();
    c.verify_count = j.at("verify_count").get<int>();
    c.project_owned = j.at("project_owned").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed target record: ") + e.what());
  }
  return c;
}

std::string serialize_targets(const std::vector<CandidateTarget>& targets) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : targets) arr.push_back(to_json(t));
  return arr.dump(2) + "\n";
}

std::vector<CandidateTarget> parse_targets(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("targets file is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "targets file must be an array");
  std::vector<CandidateTarget> out;
  for (const auto& e : j) out.push_back(candidate_from_json(e));
  return out;
}

}  // namespace stubforge
