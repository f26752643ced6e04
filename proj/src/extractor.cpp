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

#include "stubforge/extractor.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "stubforge/error.hpp"
#include "stubforge/java/literals.hpp"

namespace stubforge {

using java::CompilationUnit;
using java::TokenKind;
using java::TokenRange;
using ojson = nlohmann::ordered_json;

std::string_view to_string(ArgumentCapture::Kind kind) {
  switch (kind) {
    case ArgumentCapture::Kind::Literal: return "literal";
    case ArgumentCapture::Kind::Expression: return "expression";
    case ArgumentCapture::Kind::Matcher: return "matcher";
  }
  return "expression";
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Return: return "return";
    case ActionKind::Throw: return "throw";
    case ActionKind::Answer: return "answer";
  }
  return "answer";
}

std::string_view to_string(CardinalityKind kind) {
  switch (kind) {
    case CardinalityKind::Unspecified: return "unspecified";
    case CardinalityKind::Times: return "times";
    case CardinalityKind::Never: return "never";
    case CardinalityKind::AtLeast: return "at_least";
  }
  return "unspecified";
}

MockCorpus::MockCorpus(const SourceIndex& index, const MockingDialect& dialect,
                       const ScanConfig& config)
    : index_(index), dialect_(dialect), resolver_(index), analyses_(index.test_units.size()) {
  parallel_for(index.test_units.size(), config.execution, [&](std::size_t i) {
    analyses_[i] = analyze_test_unit(*index.test_units[i].tree, dialect, resolver_, config);
  });
}

namespace {

ArgumentCapture capture(const CompilationUnit& unit, const MockingDialect& dialect, TokenRange r) {
  ArgumentCapture a;
  a.text = std::string(unit.text(r));
  if (dialect.is_matcher_call(unit.tokens, r)) {
    a.kind = ArgumentCapture::Kind::Matcher;
  } else if (auto lit = java::normalize_literal(unit.tokens, r)) {
    a.kind = ArgumentCapture::Kind::Literal;
    a.resolved_literal = std::move(lit);
  }
  return a;
}

std::vector<ArgumentCapture> captures(const CompilationUnit& unit, const MockingDialect& dialect,
                                      const MockOperation& op) {
  std::vector<ArgumentCapture> out;
  for (const auto& r : op.argument_list) out.push_back(capture(unit, dialect, r));
  return out;
}

StubAction action_of(const CompilationUnit& unit, const MockOperation& op) {
  StubAction a;
  if (op.actions.size() == 1) {
    const auto& only = op.actions.front();
    bool single_value = !only.value.empty() && split_arguments(unit.tokens, only.value).size() == 1;
    if (single_value) {
      a.kind = only.kind;
      a.text = std::string(unit.text(only.value));
      return a;
    }
  }
  a.kind = ActionKind::Answer;
  for (std::size_t i = 0; i < op.actions.size(); ++i) {
    if (i) a.text += ".";
    a.text += unit.text(op.actions[i].link);
  }
  return a;
}

// Type created by `new T(...)` or a creation call at the start of `value`.
std::optional<std::string> created_type(const CompilationUnit& unit, TokenRange value,
                                        const MockingDialect& dialect,
                                        const TypeResolver& resolver) {
  if (value.empty()) return std::nullopt;
  const auto& toks = unit.tokens;
  for (const auto& p : dialect.creation_calls) {
    if (auto m = dialect.match_call(p, toks, value.begin))
      return resolver.resolve(unit.text(m->captures.at("TYPE")), unit);
  }
  if (toks[value.begin].is("new")) {
    std::size_t i = value.begin + 1;
    std::size_t start = i;
    while (i < value.end && toks[i].kind == TokenKind::Identifier) {
      if (i + 1 < value.end && toks[i + 1].is(".")) {
        i += 2;
      } else {
        ++i;
        break;
      }
    }
    if (i > start) return resolver.resolve(unit.text({start, i}), unit);
  }
  return std::nullopt;
}

ojson location_json(const SourceLocation& l) { return ojson{{"file", l.file}, {"line", l.line}}; }

ojson arguments_json(const std::vector<ArgumentCapture>& args) {
  ojson arr = ojson::array();
  for (const auto& a : args) {
    ojson j;
    j["kind"] = to_string(a.kind);
    j["text"] = a.text;
    if (a.resolved_literal) j["resolved_literal"] = *a.resolved_literal;
    arr.push_back(std::move(j));
  }
  return arr;
}

ojson to_json(const Stubbing& s) {
  ojson j;
  j["test_id"] = s.test_id;
  j["method"] = s.method;
  j["arguments"] = arguments_json(s.arguments);
  j["action"] = ojson{{"kind", to_string(s.action.kind)}, {"text", s.action.text}};
  j["inherited"] = s.inherited;
  j["location"] = location_json(s.location);
  return j;
}

ojson to_json(const VerifyOp& v) {
  ojson j;
  j["test_id"] = v.test_id;
  j["method"] = v.method;
  j["arguments"] = arguments_json(v.arguments);
  ojson c;
  c["kind"] = to_string(v.cardinality.kind);
  if (v.cardinality.count) c["count"] = *v.cardinality.count;
  j["cardinality"] = std::move(c);
  j["inherited"] = v.inherited;
  j["location"] = location_json(v.location);
  return j;
}

ojson to_json(const SetupEntry& e) {
  ojson j;
  j["field"] = e.field;
  j["expression"] = e.expression;
  j["location"] = location_json(e.location);
  return j;
}

std::string dump(const ojson& j, int indent = -1) {
  return j.dump(indent, ' ', false, ojson::error_handler_t::replace);
}

template <typename T>
void sort_entries(std::vector<T>& v) {
  std::vector<std::pair<std::string, T>> keyed;
  for (auto& e : v) keyed.emplace_back(dump(to_json(e)), std::move(e));
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.location.file, a.second.location.line, a.first) <
           std::tie(b.second.location.file, b.second.location.line, b.first);
  });
  v.clear();
  for (auto& [k, e] : keyed) v.push_back(std::move(e));
}

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorCode::InvariantViolation, what);
}

void validate_arguments(const std::vector<ArgumentCapture>& args, const std::string& where) {
  for (const auto& a : args) {
    if (a.text.empty()) violation(where + ": empty argument text");
    if (a.resolved_literal && a.kind != ArgumentCapture::Kind::Literal)
      violation(where + ": resolved_literal on a non-literal argument");
  }
}

void validate_location(const SourceLocation& l, const std::string& where) {
  if (l.file.empty()) violation(where + ": empty location file");
  if (l.line < 1) violation(where + ": line must be >= 1");
}

template <typename T>
T enum_from(const std::string& s, std::initializer_list<T> values) {
  for (T v : values)
    if (to_string(v) == s) return v;
  violation("unknown kind '" + s + "'");
}

SourceLocation location_from(const nlohmann::json& j) {
  return {j.at("file").get<std::string>(), j.at("line").get<int>()};
}

std::vector<ArgumentCapture> arguments_from(const nlohmann::json& arr) {
  std::vector<ArgumentCapture> out;
  for (const auto& a : arr) {
    ArgumentCapture c;
    c.kind = enum_from(a.at("kind").get<std::string>(),
                       {ArgumentCapture::Kind::Literal, ArgumentCapture::Kind::Expression,
                        ArgumentCapture::Kind::Matcher});
    c.text = a.at("text").get<std::string>();
    if (a.contains("resolved_literal")) c.resolved_literal = a.at("resolved_literal").get<std::string>();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<SetupEntry> collect_setup_context(const TestUnitAnalysis& analysis,
                                              const CandidateTarget& target,
                                              const MockingDialect& dialect,
                                              const TypeResolver& resolver) {
  const CompilationUnit& unit = *analysis.unit;
  std::set<std::string> argument_names;
  for (const auto& op : analysis.operations) {
    if (op.mocked_type != target.qualified_name) continue;
    for (std::size_t i = op.arguments.begin; i < op.arguments.end; ++i)
      if (unit.tokens[i].kind == TokenKind::Identifier) argument_names.insert(unit.tokens[i].text);
  }
  std::vector<SetupEntry> out;
  for (const auto& fa : analysis.field_assignments) {
    auto type = created_type(unit, fa.value, dialect, resolver);
    bool creates_target = type && *type == target.qualified_name;
    if (!creates_target && !argument_names.count(fa.field)) continue;
    out.push_back({fa.field, std::string(unit.text(fa.value)), {unit.path, fa.line}});
  }
  return out;
}

std::vector<SetupEntry> collect_setup_context(const TestUnit& test_unit,
                                              const CandidateTarget& target,
                                              const MockingDialect& dialect,
                                              const SourceIndex& index) {
  TypeResolver resolver(index);
  auto analysis = analyze_test_unit(*test_unit.tree, dialect, resolver, ScanConfig{});
  return collect_setup_context(analysis, target, dialect, resolver);
}

MockExtract extract_mock_info(const CutProfile& cut, const MockCorpus& corpus) {
  const std::string& qn = cut.target.qualified_name;
  const ProductionUnit* production = corpus.index().find(qn);
  MockExtract x;
  x.qualified_name = qn;
  x.source_path = cut.source_path;
  auto declared = [&](const std::string& m) { return production && production->declares(m); };
  for (const auto& analysis : corpus.analyses()) {
    const CompilationUnit& unit = *analysis.unit;
    for (const auto& op : analysis.operations) {
      if (op.mocked_type != qn) continue;
      SourceLocation loc{unit.path, op.line};
      if (op.kind == MockOpKind::Stubbing) {
        x.stubbings.push_back({op.test_id, op.method, captures(unit, corpus.dialect(), op),
                               action_of(unit, op), !declared(op.method), loc});
      } else {
        x.verifications.push_back({op.test_id, op.method, captures(unit, corpus.dialect(), op),
                                   {op.cardinality.kind, op.cardinality.count},
                                   !declared(op.method), loc});
      }
    }
    auto setup = collect_setup_context(analysis, cut.target, corpus.dialect(), corpus.resolver());
    x.setup_context.insert(x.setup_context.end(), setup.begin(), setup.end());
  }
  if (x.stubbings.empty() && x.verifications.empty())
    throw Error(ErrorCode::ExtractionEmpty,
                "no stubbing or verify operations found for " + qn +
                    " although it was selected as mocked");
  canonicalize(x);
  return x;
}

MockExtract extract_mock_info(const CutProfile& cut, const SourceIndex& index,
                              const MockingDialect& dialect) {
  MockCorpus corpus(index, dialect);
  return extract_mock_info(cut, corpus);
}

std::vector<MockExtract> extract_all(const std::vector<CutProfile>& cuts, const MockCorpus& corpus,
                                     Execution exec) {
  std::vector<MockExtract> out(cuts.size());
  parallel_for(cuts.size(), exec, [&](std::size_t i) { out[i] = extract_mock_info(cuts[i], corpus); });
  return out;
}

void canonicalize(MockExtract& extract) {
  sort_entries(extract.stubbings);
  sort_entries(extract.verifications);
  sort_entries(extract.setup_context);
}

void validate(const MockExtract& x) {
  if (x.qualified_name.empty()) violation("target qualified_name is empty");
  if (x.stubbings.empty() && x.verifications.empty())
    violation("extract for " + x.qualified_name + " has no stubbings or verifications");
  for (const auto& s : x.stubbings) {
    std::string where = "stubbing at " + s.location.file + ":" + std::to_string(s.location.line);
    if (s.method.empty()) violation(where + ": empty method");
    if (s.test_id.empty()) violation(where + ": empty test_id");
    validate_location(s.location, where);
    validate_arguments(s.arguments, where);
  }
  for (const auto& v : x.verifications) {
    std::string where = "verification at " + v.location.file + ":" + std::to_string(v.location.line);
    if (v.method.empty()) violation(where + ": empty method");
    if (v.test_id.empty()) violation(where + ": empty test_id");
    validate_location(v.location, where);
    validate_arguments(v.arguments, where);
    const auto& c = v.cardinality;
    bool counted = c.kind == CardinalityKind::Times || c.kind == CardinalityKind::AtLeast;
    if (counted && (!c.count || *c.count < 0)) violation(where + ": cardinality needs a count >= 0");
    if (!counted && c.count) violation(where + ": cardinality carries an unexpected count");
  }
  for (const auto& e : x.setup_context) {
    std::string where = "setup entry at " + e.location.file + ":" + std::to_string(e.location.line);
    if (e.field.empty()) violation(where + ": empty field");
    if (e.expression.empty()) violation(where + ": empty expression");
    validate_location(e.location, where);
  }
}

std::string serialize_extract(const MockExtract& extract) {
  validate(extract);
  MockExtract x = extract;
  canonicalize(x);
  ojson j;
  j["target"] = ojson{{"qualified_name", x.qualified_name}, {"source_path", x.source_path}};
  j["stubbings"] = ojson::array();
  for (const auto& s : x.stubbings) j["stubbings"].push_back(to_json(s));
  j["verifications"] = ojson::array();
  for (const auto& v : x.verifications) j["verifications"].push_back(to_json(v));
  j["setup_context"] = ojson::array();
  for (const auto& e : x.setup_context) j["setup_context"].push_back(to_json(e));
  return dump(j, 2) + "\n";
}

MockExtract deserialize_extract(std::string_view json_text) {
  MockExtract x;
  try {
    auto j = nlohmann::json::parse(json_text);
    x.qualified_name = j.at("target").at("qualified_name").get<std::string>();
    x.source_path = j.at("target").at("source_path").get<std::string>();
    for (const auto& s : j.at("stubbings")) {
      Stubbing st;
      st.test_id = s.at("test_id").get<std::string>();
      st.method = s.at("method").get<std::string>();
      st.arguments = arguments_from(s.at("arguments"));
      st.action.kind = enum_from(s.at("action").at("kind").get<std::string>(),
                                 {ActionKind::Return, ActionKind::Throw, ActionKind::Answer});
      st.action.text = s.at("action").at("text").get<std::string>();
      st.inherited = s.at("inherited").get<bool>();
      st.location = location_from(s.at("location"));
      x.stubbings.push_back(std::move(st));
    }
    for (const auto& v : j.at("verifications")) {
      VerifyOp op;
      op.test_id = v.at("test_id").get<std::string>();
      op.method = v.at("method").get<std::string>();
      op.arguments = arguments_from(v.at("arguments"));
      const auto& c = v.at("cardinality");
      op.cardinality.kind = enum_from(c.at("kind").get<std::string>(),
                                      {CardinalityKind::Unspecified, CardinalityKind::Times,
                                       CardinalityKind::Never, CardinalityKind::AtLeast});
      if (c.contains("count")) op.cardinality.count = c.at("count").get<long long>();
      op.inherited = v.at("inherited").get<bool>();
      op.location = location_from(v.at("location"));
      x.verifications.push_back(std::move(op));
    }
    for (const auto& e : j.at("setup_context")) {
      x.setup_context.push_back({e.at("field").get<std::string>(),
                                 e.at("expression").get<std::string>(),
                                 location_from(e.at("location"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvariantViolation, std::string("malformed mock extract: ") + e.what());
  }
  validate(x);
  return x;
}

}  // namespace stubforge
