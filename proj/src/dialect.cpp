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

#include "stubforge/dialect.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stubforge/error.hpp"

namespace stubforge {

using java::Token;
using java::TokenKind;
using java::TokenRange;

namespace {

bool is_span_placeholder(const std::string& name) {
  return name != "MOCK" && name != "METHOD" && name != "TYPE" && name != "N";
}

bool opens(const Token& t) { return t.is("(") || t.is("[") || t.is("{"); }
bool closes(const Token& t) { return t.is(")") || t.is("]") || t.is("}"); }

}  // namespace

TokenPattern::TokenPattern(std::string_view source) : source_(source) {
  std::istringstream in{std::string(source)};
  std::string word;
  while (in >> word) {
    Element e;
    if (word.size() > 1 && word[0] == '$') {
      e.placeholder = true;
      e.text = word.substr(1);
    } else {
      e.text = word;
    }
    elements_.push_back(std::move(e));
  }
  if (elements_.empty()) throw Error(ErrorCode::ConfigError, "empty token pattern");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    if (e.placeholder && is_span_placeholder(e.text) &&
        (i + 1 == elements_.size() || elements_[i + 1].placeholder)) {
      throw Error(ErrorCode::ConfigError,
                  "span placeholder $" + e.text + " must be followed by a literal in '" +
                      source_ + "'");
    }
  }
}

std::optional<TokenPattern::Match> TokenPattern::match(const std::vector<Token>& tokens,
                                                       std::size_t at) const {
  Match m;
  std::size_t i = at;
  auto in_range = [&](std::size_t k) { return k < tokens.size() && tokens[k].kind != TokenKind::End; };
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Element& el = elements_[e];
    if (!el.placeholder) {
      if (!in_range(i) || !tokens[i].is(el.text)) return std::nullopt;
      ++i;
      continue;
    }
    std::size_t start = i;
    if (el.text == "MOCK") {
      if (in_range(i + 2) && tokens[i].is("this") && tokens[i + 1].is(".") &&
          tokens[i + 2].kind == TokenKind::Identifier) {
        start = i + 2;
        i += 3;
      } else if (in_range(i) && tokens[i].kind == TokenKind::Identifier) {
        ++i;
      } else {
        return std::nullopt;
      }
    } else if (el.text == "METHOD") {
      if (!in_range(i) || tokens[i].kind != TokenKind::Identifier) return std::nullopt;
      ++i;
    } else if (el.text == "TYPE") {
      if (!in_range(i) || tokens[i].kind != TokenKind::Identifier) return std::nullopt;
      ++i;
      while (in_range(i + 1) && tokens[i].is(".") && tokens[i + 1].kind == TokenKind::Identifier) {
        i += 2;
      }
    } else if (el.text == "N") {
      if (!in_range(i) || tokens[i].kind != TokenKind::IntLiteral) return std::nullopt;
      ++i;
    } else {
      const std::string& stop = elements_[e + 1].text;
      int depth = 0;
      while (true) {
        if (!in_range(i)) return std::nullopt;
        const Token& t = tokens[i];
        if (depth == 0 && t.is(stop)) break;
        if (t.is(";") && depth == 0) return std::nullopt;
        if (opens(t)) {
          ++depth;
        } else if (closes(t)) {
          if (depth == 0) return std::nullopt;
          --depth;
        }
        ++i;
      }
    }
    m.captures[el.text] = TokenRange{start, i};
  }
  m.end = i;
  return m;
}

std::size_t MockingDialect::qualifier_length(const std::vector<Token>& tokens,
                                             std::size_t at) const {
  for (const auto& q : qualifiers) {
    std::size_t i = at;
    std::size_t seg_start = 0;
    bool ok = true;
    while (seg_start <= q.size()) {
      std::size_t dot = q.find('.', seg_start);
      std::string_view seg = std::string_view(q).substr(
          seg_start, dot == std::string::npos ? std::string::npos : dot - seg_start);
      if (i + 1 >= tokens.size() || !tokens[i].is(seg) || !tokens[i + 1].is(".")) {
        ok = false;
        break;
      }
      i += 2;
      if (dot == std::string::npos) break;
      seg_start = dot + 1;
    }
    if (ok) return i - at;
  }
  return 0;
}

std::optional<TokenPattern::Match> MockingDialect::match_call(const TokenPattern& pattern,
                                                              const std::vector<Token>& tokens,
                                                              std::size_t at) const {
  if (at > 0 && tokens[at - 1].is(".")) return std::nullopt;
  std::size_t q = qualifier_length(tokens, at);
  return pattern.match(tokens, at + q);
}

bool MockingDialect::is_matcher_call(const std::vector<Token>& tokens, TokenRange arg) const {
  if (arg.empty()) return false;
  std::size_t i = arg.begin + qualifier_length(tokens, arg.begin);
  if (i + 1 >= arg.end) return false;
  if (tokens[i].kind != TokenKind::Identifier || !tokens[i + 1].is("(")) return false;
  return std::find(matchers.begin(), matchers.end(), tokens[i].text) != matchers.end();
}

namespace {

ActionKind action_kind(const std::string& s) {
  if (s == "return") return ActionKind::Return;
  if (s == "throw") return ActionKind::Throw;
  if (s == "answer") return ActionKind::Answer;
  throw Error(ErrorCode::ConfigError, "unknown action kind '" + s + "'");
}

CardinalityKind cardinality_kind(const std::string& s) {
  if (s == "times") return CardinalityKind::Times;
  if (s == "never") return CardinalityKind::Never;
  if (s == "at_least") return CardinalityKind::AtLeast;
  if (s == "unspecified") return CardinalityKind::Unspecified;
  throw Error(ErrorCode::ConfigError, "unknown cardinality kind '" + s + "'");
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* what) {
  if (v.empty()) throw Error(ErrorCode::ConfigError, std::string("dialect has no ") + what);
}

}  // namespace

MockingDialect parse_dialect(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("dialect is not valid JSON: ") + e.what());
  }
  MockingDialect d;
  try {
    d.name = j.value("name", "unnamed");
    d.qualifiers = j.value("qualifiers", std::vector<std::string>{});
    const auto& creation = j.at("creation");
    for (const auto& p : creation.value("calls", std::vector<std::string>{})) {
      TokenPattern tp(p);
      bool has_type = std::any_of(tp.elements().begin(), tp.elements().end(), [](const auto& e) {
        return e.placeholder && e.text == "TYPE";
      });
      if (!has_type)
        throw Error(ErrorCode::ConfigError, "creation pattern '" + p + "' has no $TYPE");
      d.creation_calls.push_back(std::move(tp));
    }
    d.creation_annotations = creation.value("annotations", std::vector<std::string>{});
    for (const auto& s : j.at("stubbings")) {
      StubbingPattern sp;
      std::string order = s.value("order", "trigger_first");
      if (order == "trigger_first") {
        sp.order = StubbingPattern::Order::TriggerFirst;
      } else if (order == "action_first") {
        sp.order = StubbingPattern::Order::ActionFirst;
      } else {
        throw Error(ErrorCode::ConfigError, "unknown stubbing order '" + order + "'");
      }
      sp.trigger = TokenPattern(s.at("trigger").get<std::string>());
      for (const auto& a : s.at("actions")) {
        sp.actions.push_back(
            {TokenPattern(a.at("pattern").get<std::string>()), action_kind(a.at("kind"))});
      }
      require_nonempty(sp.actions, "stubbing actions");
      d.stubbings.push_back(std::move(sp));
    }
    for (const auto& v : j.at("verifications")) {
      d.verifications.push_back({TokenPattern(v.at("pattern").get<std::string>())});
    }
    for (const auto& c : j.value("cardinalities", nlohmann::json::array())) {
      CardinalityPattern cp;
      cp.pattern = TokenPattern(c.at("pattern").get<std::string>());
      cp.kind = cardinality_kind(c.at("kind"));
      if (c.contains("count")) cp.fixed_count = c.at("count").get<long long>();
      d.cardinalities.push_back(std::move(cp));
    }
    d.matchers = j.value("matchers", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed dialect: ") + e.what());
  }
  if (d.creation_calls.empty() && d.creation_annotations.empty())
    throw Error(ErrorCode::ConfigError, "dialect has no creation patterns");
  require_nonempty(d.stubbings, "stubbing patterns");
  require_nonempty(d.verifications, "verify patterns");
  require_nonempty(d.matchers, "matcher patterns");
  return d;
}

MockingDialect load_dialect(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read dialect " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dialect(ss.str());
}

}  // namespace stubforge
