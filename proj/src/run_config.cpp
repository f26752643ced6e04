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

#include "stubforge/run_config.hpp"

#include "stubforge/error.hpp"

#include <fnmatch.h>

#include <fstream>
#include <set>
#include <sstream>

namespace stubforge {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

// Reads `obj` key by key, rejecting anything not consumed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) bad(name_ + " must be an object");
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) bad("unknown key " + name_ + "." + k);
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      bad(name_ + "." + key + " has the wrong type");
    }
  }
  void raw(const char* key, json& out) {
    seen_.insert(key);
    if (j_.contains(key)) out = j_.at(key);
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

bool is_valid_mode(std::string_view mode) { return mode == "mock_informed" || mode == "baseline"; }

fs::path RunConfig::resolve(const std::string& p) const {
  if (p.empty()) return {};
  fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path;
  return (base_dir / path).lexically_normal();
}

void RunConfig::validate() const {
  if (project.root.empty()) bad("project.root is required");
  if (limits.compile_retries < 0 || limits.runtime_retries < 0) bad("retries must be >= 0");
  if (limits.parallelism < 1) bad("parallelism must be >= 1");
  if (repetitions < 1) bad("repetitions must be >= 1");
  if (llm.max_attempts < 1) bad("llm.max_attempts must be >= 1");
  if (llm.budget == 0) bad("llm.budget must be > 0");
  if (llm.requests_per_minute < 0) bad("llm.requests_per_minute must be >= 0");
  if (!is_valid_mode(llm.mode)) bad("llm.mode must be mock_informed or baseline, not '" + llm.mode + "'");
  if (project.build_tool.is_string()) {
    auto t = project.build_tool.get<std::string>();
    if (t != "maven" && t != "gradle" && t != "scripted") bad("unknown build tool '" + t + "'");
    if (t == "scripted" && paths.scripted_toolchain.empty()) bad("the scripted build tool needs paths.scripted_toolchain");
  } else if (!project.build_tool.is_object()) {
    bad("project.build_tool must be a name or a command-set object");
  }
  if (llm.provider == "scripted" && paths.scripted_replies.empty()) bad("the scripted provider needs paths.scripted_replies");
}

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("config is not JSON: ") + e.what());
  }
  RunConfig c;
  c.base_dir = base_dir;
  {
    Section top(j, "config");
    if (const json* p = top.child("project")) {
      Section s(*p, "project");
      s.get("root", c.project.root);
      s.raw("build_tool", c.project.build_tool);
      s.get("test_roots", c.project.test_roots);
      s.finish();
    }
    if (const json* p = top.child("filters")) {
      Section s(*p, "filters");
      s.get("include", c.filters.include);
      s.get("exclude", c.filters.exclude);
      s.get("min_loc", c.filters.criteria.loc);
      s.get("min_methods", c.filters.criteria.methods);
      s.get("min_max_cc", c.filters.criteria.cc);
      s.finish();
    }
    if (const json* p = top.child("llm")) {
      Section s(*p, "llm");
      s.get("provider", c.llm.provider);
      s.get("model", c.llm.model);
      s.get("budget", c.llm.budget);
      s.get("mode", c.llm.mode);
      s.get("max_attempts", c.llm.max_attempts);
      s.get("requests_per_minute", c.llm.requests_per_minute);
      s.finish();
    }
    if (const json* p = top.child("limits")) {
      Section s(*p, "limits");
      s.get("compile_retries", c.limits.compile_retries);
      s.get("runtime_retries", c.limits.runtime_retries);
      s.get("parallelism", c.limits.parallelism);
      s.finish();
    }
    if (const json* p = top.child("paths")) {
      Section s(*p, "paths");
      s.get("run_dir", c.paths.run_dir);
      s.get("templates", c.paths.templates);
      s.get("prices", c.paths.prices);
      s.get("dialect", c.paths.dialect);
      s.get("kill_sets", c.paths.kill_sets);
      s.get("scripted_replies", c.paths.scripted_replies);
      s.get("scripted_toolchain", c.paths.scripted_toolchain);
      s.finish();
    }
    top.get("repetitions", c.repetitions);
    top.finish();
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) bad("cannot read config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), fs::absolute(file).parent_path());
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["project"] = {{"root", c.project.root}, {"build_tool", ordered_json::parse(c.project.build_tool.dump())}, {"test_roots", c.project.test_roots}};
  j["filters"] = {{"include", c.filters.include},
                  {"exclude", c.filters.exclude},
                  {"min_loc", c.filters.criteria.loc},
                  {"min_methods", c.filters.criteria.methods},
                  {"min_max_cc", c.filters.criteria.cc}};
  j["llm"] = {{"provider", c.llm.provider},
              {"model", c.llm.model},
              {"budget", c.llm.budget},
              {"mode", c.llm.mode},
              {"max_attempts", c.llm.max_attempts},
              {"requests_per_minute", c.llm.requests_per_minute}};
  j["limits"] = {{"compile_retries", c.limits.compile_retries},
                 {"runtime_retries", c.limits.runtime_retries},
                 {"parallelism", c.limits.parallelism}};
  j["paths"] = {{"run_dir", c.paths.run_dir},
                {"templates", c.paths.templates},
                {"prices", c.paths.prices},
                {"dialect", c.paths.dialect},
                {"kill_sets", c.paths.kill_sets},
                {"scripted_replies", c.paths.scripted_replies},
                {"scripted_toolchain", c.paths.scripted_toolchain}};
  j["repetitions"] = c.repetitions;
  return j;
}

bool name_matches(std::string_view glob, std::string_view name) {
  return fnmatch(std::string(glob).c_str(), std::string(name).c_str(), 0) == 0;
}

bool selected_by(const RunConfig::Filters& filters, std::string_view name) {
  bool in = filters.include.empty();
  for (const auto& g : filters.include) in = in || name_matches(g, name);
  if (!in) return false;
  for (const auto& g : filters.exclude)
    if (name_matches(g, name)) return false;
  return true;
}

}  // namespace stubforge
