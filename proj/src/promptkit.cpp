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

#include "stubforge/promptkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "stubforge/java/lexer.hpp"

namespace stubforge {

namespace fs = std::filesystem;

const std::vector<RequiredClause> kGenerationClauses = {
    {"exact_values", "exact values"},
    {"mutation_assertions", "fail under realistic mutations"},
    {"both_paths", "test both true and false execution paths"},
    {"real_objects", "instantiate and exercise real objects"},
};
const std::vector<RequiredClause> kRepairClauses = {
    {"no_explanations", "no explanations"},
};
const RequiredClause kEscalationClause = {"escalation", "a significant change in approach"};

namespace {

constexpr std::string_view kNoToolOutput = "no tool output captured";
constexpr std::string_view kNotePrefix = "\n\nContext left out to fit the token budget: ";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string with_newline(std::string s) {
  if (s.empty() || s.back() != '\n') s += '\n';
  return s;
}

// Fence longer than any backtick run in the body, so the body stays verbatim.
std::string fenced(std::string_view lang, const std::string& body) {
  std::size_t longest = 0, run = 0;
  for (char c : body) {
    run = c == '`' ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  std::string fence(std::max<std::size_t>(3, longest + 1), '`');
  return fence + std::string(lang) + "\n" + with_newline(body) + fence;
}

void require_file_part(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::TemplateInvalid, "missing " + p.string());
}

std::string_view simple_name(std::string_view qn) {
  auto dot = qn.rfind('.');
  return dot == std::string_view::npos ? qn : qn.substr(dot + 1);
}

void validate_clauses(const PromptTemplate& t, std::string_view block,
                      const std::vector<RequiredClause>& clauses) {
  if (!t.has_block(block))
    throw Error(ErrorCode::TemplateInvalid, t.name() + ": missing @@" + std::string(block));
  for (const auto& c : clauses) {
    auto text = t.clause(block, c.id);
    if (!text)
      throw Error(ErrorCode::TemplateInvalid,
                  t.name() + ": @@" + std::string(block) + " lacks clause " + std::string(c.id));
    if (lower(*text).find(lower(c.phrase)) == std::string::npos)
      throw Error(ErrorCode::TemplateInvalid, t.name() + ": clause " + std::string(c.id) +
                                                  " must contain \"" + std::string(c.phrase) + "\"");
  }
}

// Mock entries in (file, line) order across all three lists.
struct EntryRef {
  int list;  // 0 stubbing, 1 verify, 2 setup
  std::size_t index;
  const SourceLocation* location;
};

std::vector<EntryRef> merged_entries(const MockExtract& x) {
  std::vector<EntryRef> refs;
  for (std::size_t i = 0; i < x.stubbings.size(); ++i) refs.push_back({0, i, &x.stubbings[i].location});
  for (std::size_t i = 0; i < x.verifications.size(); ++i)
    refs.push_back({1, i, &x.verifications[i].location});
  for (std::size_t i = 0; i < x.setup_context.size(); ++i)
    refs.push_back({2, i, &x.setup_context[i].location});
  std::stable_sort(refs.begin(), refs.end(), [](const EntryRef& a, const EntryRef& b) {
    if (a.location->file != b.location->file) return a.location->file < b.location->file;
    return a.location->line < b.location->line;
  });
  return refs;
}

MockExtract keep_first(const MockExtract& x, const std::vector<EntryRef>& refs, std::size_t keep) {
  MockExtract out;
  out.qualified_name = x.qualified_name;
  out.source_path = x.source_path;
  std::vector<std::size_t> kept[3];
  for (std::size_t i = 0; i < keep && i < refs.size(); ++i) kept[refs[i].list].push_back(refs[i].index);
  for (auto& k : kept) std::sort(k.begin(), k.end());
  for (auto i : kept[0]) out.stubbings.push_back(x.stubbings[i]);
  for (auto i : kept[1]) out.verifications.push_back(x.verifications[i]);
  for (auto i : kept[2]) out.setup_context.push_back(x.setup_context[i]);
  return out;
}

std::string mock_section(const MockExtract& x) {
  return "Mocking information for " + x.qualified_name +
         ", collected from stubbings and verify operations in the project's existing tests:\n" +
         fenced("json", serialize_extract(x));
}

std::string fewshot_section(int n, const FewShotExample& ex, bool with_mocks) {
  std::string s = "Example " + std::to_string(n) + ".\nClass under test:\n" +
                  fenced("java", ex.subject_source) + "\n";
  if (with_mocks) s += "Mocking information:\n" + fenced("json", ex.mock_json) + "\n";
  s += "Tests:\n" + fenced("java", ex.expected_tests);
  return s;
}

std::string cut_section(const CutProfile& cut) {
  return "Class under test, " + cut.source_path + ":\n" + fenced("java", cut.source_text);
}

void strip_note(std::string& body) {
  auto pos = body.find(kNotePrefix);
  if (pos != std::string::npos) body.erase(pos);
}

}  // namespace

std::size_t TokenEstimator::estimate(std::string_view text) const {
  if (!(chars_per_token > 0)) throw Error(ErrorCode::ConfigError, "chars_per_token must be positive");
  return static_cast<std::size_t>(std::ceil(static_cast<double>(text.size()) / chars_per_token));
}

const PromptSection* PromptBundle::section(std::string_view label) const {
  for (const auto& s : sections)
    if (s.label == label) return &s;
  return nullptr;
}

std::string PromptBundle::render_user() const {
  std::string out;
  for (const auto& s : sections) {
    if (!out.empty()) out += "\n\n";
    out += s.body;
  }
  return with_newline(out);
}

std::string PromptBundle::render() const { return system_text + "\n\n" + render_user(); }

PromptTemplate PromptTemplate::parse(std::string_view text, std::string name) {
  PromptTemplate t;
  t.name_ = std::move(name);
  std::string current;
  std::string body;
  bool in_block = false;
  auto flush = [&] {
    if (!in_block) return;
    while (!body.empty() && body.back() == '\n') body.pop_back();
    if (!t.blocks_.emplace(current, body).second)
      throw Error(ErrorCode::TemplateInvalid, t.name_ + ": duplicate block @@" + current);
    body.clear();
  };
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("@@", 0) == 0) {
      flush();
      current = line.substr(2);
      while (!current.empty() && std::isspace(static_cast<unsigned char>(current.back())))
        current.pop_back();
      if (current.empty()) throw Error(ErrorCode::TemplateInvalid, t.name_ + ": unnamed block");
      in_block = true;
      continue;
    }
    if (!in_block) {
      if (line.find_first_not_of(" \t") != std::string::npos)
        throw Error(ErrorCode::TemplateInvalid, t.name_ + ": text before the first @@ block");
      continue;
    }
    body += line;
    body += '\n';
  }
  flush();
  // Markers must pair up and not nest.
  for (const auto& [block, b] : t.blocks_) {
    bool open = false;
    for (std::size_t pos = b.find("{{"); pos != std::string::npos; pos = b.find("{{", pos + 2)) {
      auto end = b.find("}}", pos);
      if (end == std::string::npos)
        throw Error(ErrorCode::TemplateInvalid, t.name_ + ": unterminated {{ in @@" + block);
      std::string_view tag(b.data() + pos + 2, end - pos - 2);
      if (tag.rfind("#clause ", 0) == 0) {
        if (open) throw Error(ErrorCode::TemplateInvalid, t.name_ + ": nested clause in @@" + block);
        open = true;
      } else if (tag == "/clause") {
        if (!open) throw Error(ErrorCode::TemplateInvalid, t.name_ + ": stray {{/clause}} in @@" + block);
        open = false;
      }
    }
    if (open) throw Error(ErrorCode::TemplateInvalid, t.name_ + ": unclosed clause in @@" + block);
  }
  return t;
}

PromptTemplate PromptTemplate::load(const fs::path& path) {
  require_file_part(path);
  return parse(read_file(path), path.filename().string());
}

bool PromptTemplate::has_block(std::string_view block) const { return blocks_.find(block) != blocks_.end(); }

std::optional<std::string> PromptTemplate::clause(std::string_view block, std::string_view id) const {
  auto it = blocks_.find(block);
  if (it == blocks_.end()) return std::nullopt;
  std::string open = "{{#clause " + std::string(id) + "}}";
  auto start = it->second.find(open);
  if (start == std::string::npos) return std::nullopt;
  start += open.size();
  auto end = it->second.find("{{/clause}}", start);
  return it->second.substr(start, end - start);
}

std::string PromptTemplate::render(std::string_view block,
                                   const std::map<std::string, std::string>& vars) const {
  auto it = blocks_.find(block);
  if (it == blocks_.end())
    throw Error(ErrorCode::TemplateInvalid, name_ + ": missing @@" + std::string(block));
  const std::string& b = it->second;
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = b.find("{{", pos);
    out.append(b, pos, open == std::string::npos ? std::string::npos : open - pos);
    if (open == std::string::npos) break;
    auto close = b.find("}}", open);
    std::string tag = b.substr(open + 2, close - open - 2);
    pos = close + 2;
    if (tag.rfind("#clause ", 0) == 0 || tag == "/clause") continue;
    auto v = vars.find(tag);
    if (v == vars.end())
      throw Error(ErrorCode::TemplateInvalid, name_ + ": unknown placeholder {{" + tag + "}}");
    out += v->second;
  }
  return out;
}

void validate_generation_template(const PromptTemplate& t) {
  if (!t.has_block("system")) throw Error(ErrorCode::TemplateInvalid, t.name() + ": missing @@system");
  validate_clauses(t, "instructions", kGenerationClauses);
  if (!t.has_block("output_format"))
    throw Error(ErrorCode::TemplateInvalid, t.name() + ": missing @@output_format");
}

void validate_repair_template(const PromptTemplate& t) {
  if (!t.has_block("system")) throw Error(ErrorCode::TemplateInvalid, t.name() + ": missing @@system");
  validate_clauses(t, "instructions", kRepairClauses);
  validate_clauses(t, "escalation", {kEscalationClause});
  if (!t.has_block("output_format"))
    throw Error(ErrorCode::TemplateInvalid, t.name() + ": missing @@output_format");
}

FewShotExample load_fewshot(const fs::path& dir) {
  FewShotExample ex;
  ex.name = dir.filename().string();
  for (const char* f : {"subject.java", "mocks.json", "expected_test.java"}) require_file_part(dir / f);
  ex.subject_source = read_file(dir / "subject.java");
  ex.mock_json = read_file(dir / "mocks.json");
  ex.expected_tests = read_file(dir / "expected_test.java");
  try {
    deserialize_extract(ex.mock_json);
  } catch (const Error& e) {
    throw Error(ErrorCode::TemplateInvalid, (dir / "mocks.json").string() + ": " + e.what());
  }
  return ex;
}

PromptKit::PromptKit(PromptTemplate generate, PromptTemplate repair,
                     std::vector<FewShotExample> fewshots, TokenEstimator estimator)
    : generate_(std::move(generate)),
      repair_(std::move(repair)),
      fewshots_(std::move(fewshots)),
      estimator_(estimator) {
  validate_generation_template(generate_);
  validate_repair_template(repair_);
  if (fewshots_.size() != 2)
    throw Error(ErrorCode::TemplateInvalid,
                "exactly two few-shot examples are required, got " + std::to_string(fewshots_.size()));
  estimator_.estimate("");
}

PromptKit PromptKit::load(const fs::path& dir, TokenEstimator estimator) {
  return PromptKit(PromptTemplate::load(dir / "generate.txt"), PromptTemplate::load(dir / "repair.txt"),
                   {load_fewshot(dir / "fewshot" / "1"), load_fewshot(dir / "fewshot" / "2")},
                   estimator);
}

void PromptKit::refresh(PromptBundle& bundle) const {
  for (auto& s : bundle.sections) {
    if (s.label != "output_format") continue;
    strip_note(s.body);
    if (!bundle.truncations.empty()) {
      s.body += kNotePrefix;
      for (std::size_t i = 0; i < bundle.truncations.size(); ++i)
        s.body += (i ? "; " : "") + bundle.truncations[i];
      s.body += ".";
    }
  }
  bundle.estimated_tokens = estimator_.estimate(bundle.render());
}

PromptBundle PromptKit::build_generation_prompt(const CutProfile& cut, const MockExtract* mocks,
                                                std::size_t budget) const {
  if (budget == 0) throw Error(ErrorCode::BudgetImpossible, "token budget must be positive");
  const std::string& qn = cut.target.qualified_name;
  std::map<std::string, std::string> vars{{"qualified_name", qn},
                                          {"simple_name", std::string(simple_name(qn))}};
  PromptBundle b;
  b.system_text = generate_.render("system", vars);
  b.sections.push_back({"instructions", generate_.render("instructions", vars)});
  b.sections.push_back({"cut_source", cut_section(cut)});
  b.sections.push_back({"output_format", generate_.render("output_format", vars)});
  refresh(b);
  if (b.estimated_tokens > budget)
    throw Error(ErrorCode::BudgetImpossible, "instructions and the source of " + qn + " need " +
                                                 std::to_string(b.estimated_tokens) +
                                                 " tokens, budget is " + std::to_string(budget));
  auto at = b.sections.end() - 1;
  std::vector<PromptSection> optional_parts;
  if (mocks) {
    MockExtract x = *mocks;
    canonicalize(x);
    optional_parts.push_back({"mock_data", mock_section(x)});
    b.mocks = std::move(x);
  }
  optional_parts.push_back({"fewshot_1", fewshot_section(1, fewshots_[0], mocks != nullptr)});
  optional_parts.push_back({"fewshot_2", fewshot_section(2, fewshots_[1], mocks != nullptr)});
  b.sections.insert(at, optional_parts.begin(), optional_parts.end());
  refresh(b);
  return enforce_token_budget(std::move(b), budget);
}

PromptBundle PromptKit::enforce_token_budget(PromptBundle bundle, std::size_t budget) const {
  if (bundle.estimated_tokens <= budget) return bundle;
  for (const char* label : {"fewshot_2", "fewshot_1"}) {
    auto it = std::find_if(bundle.sections.begin(), bundle.sections.end(),
                           [&](const PromptSection& s) { return s.label == label; });
    if (it == bundle.sections.end()) continue;
    bundle.sections.erase(it);
    bundle.truncations.push_back(std::string(label) + " omitted");
    refresh(bundle);
    if (bundle.estimated_tokens <= budget) return bundle;
  }
  auto mock = std::find_if(bundle.sections.begin(), bundle.sections.end(),
                           [](const PromptSection& s) { return s.label == "mock_data"; });
  if (bundle.mocks && mock != bundle.sections.end()) {
    const MockExtract full = *bundle.mocks;
    auto refs = merged_entries(full);
    // The head is never cut, and the kept part must hold one operation.
    std::size_t min_keep = 1;
    while (min_keep < refs.size() && refs[min_keep - 1].list == 2) ++min_keep;
    std::size_t mock_index = static_cast<std::size_t>(mock - bundle.sections.begin());
    auto base_truncations = bundle.truncations;
    auto trial = [&](std::size_t keep) {
      PromptBundle t = bundle;
      t.sections[mock_index].body = mock_section(keep_first(full, refs, keep));
      t.truncations = base_truncations;
      t.truncations.push_back("mock_data kept the first " + std::to_string(keep) + " of " +
                              std::to_string(refs.size()) + " entries by file and line");
      refresh(t);
      return t;
    };
    std::size_t lo = min_keep, hi = refs.size();  // answer in [lo, hi)
    if (lo < hi && trial(lo).estimated_tokens <= budget) {
      while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (trial(mid).estimated_tokens <= budget) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      PromptBundle t = trial(lo);
      t.mocks = full;
      return t;
    }
  }
  throw Error(ErrorCode::BudgetImpossible, "prompt needs " + std::to_string(bundle.estimated_tokens) +
                                               " tokens after all cuts, budget is " +
                                               std::to_string(budget));
}

PromptBundle PromptKit::build_repair_prompt(const CutProfile& cut, const CandidateTestFile& test,
                                            std::string_view diagnostics, int attempt_index,
                                            RepairPhase phase) const {
  if (attempt_index < 1)
    throw Error(ErrorCode::ContractBreach, "repair attempt index starts at 1");
  const std::string& qn = cut.target.qualified_name;
  std::map<std::string, std::string> vars{
      {"qualified_name", qn},
      {"simple_name", std::string(simple_name(qn))},
      {"attempt", std::to_string(attempt_index)},
      {"phase", phase == RepairPhase::Compile ? "compilation" : "test execution"}};
  PromptBundle b;
  b.system_text = repair_.render("system", vars);
  std::string instructions = repair_.render("instructions", vars);
  if (attempt_index >= 2) instructions += "\n" + repair_.render("escalation", vars);
  b.sections.push_back({"instructions", std::move(instructions)});
  b.sections.push_back({"cut_source", cut_section(cut)});
  b.sections.push_back({"failing_test", "Test file, " + test.file_name + ":\n" + fenced("java", test.text)});
  bool blank = std::all_of(diagnostics.begin(), diagnostics.end(),
                           [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  b.sections.push_back({"diagnostics", "Tool output:\n" +
                                           fenced("", blank ? std::string(kNoToolOutput)
                                                            : std::string(diagnostics))});
  b.sections.push_back({"output_format", repair_.render("output_format", vars)});
  refresh(b);
  return b;
}

namespace {

struct Block {
  std::size_t begin, end;  // content byte range
};

std::vector<Block> fenced_blocks(std::string_view raw) {
  std::vector<Block> blocks;
  std::size_t pos = 0;
  std::size_t open_len = 0, content_begin = 0;
  bool open = false;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    std::size_t next = eol == std::string_view::npos ? raw.size() + 1 : eol + 1;
    std::string_view line = raw.substr(pos, (eol == std::string_view::npos ? raw.size() : eol) - pos);
    std::size_t lead = line.find_first_not_of(" \t");
    std::string_view body = lead == std::string_view::npos ? std::string_view{} : line.substr(lead);
    std::size_t ticks = 0;
    while (ticks < body.size() && body[ticks] == '`') ++ticks;
    if (!open && ticks >= 3) {
      open = true;
      open_len = ticks;
      content_begin = std::min(next, raw.size());
    } else if (open && ticks >= open_len &&
               body.find_first_not_of("` \t\r") == std::string_view::npos) {
      blocks.push_back({content_begin, pos});
      open = false;
    }
    pos = next;
  }
  if (open) blocks.push_back({content_begin, raw.size()});
  return blocks;
}

bool code_start(std::string_view line) {
  static const std::regex start(
      R"(^\s*(package\s|import\s|@\w|(public|final|abstract|class|interface|record)\b))");
  return std::regex_search(line.begin(), line.end(), start);
}

std::string strip_prose(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    auto eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    lines.push_back(raw.substr(pos, eol - pos));
    pos = eol + 1;
  }
  std::size_t first = 0;
  while (first < lines.size() && !code_start(lines[first])) ++first;
  std::size_t last = lines.size();
  while (last > first && lines[last - 1].find('}') == std::string_view::npos) --last;
  if (first >= last) return std::string(raw);
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    out += lines[i];
    out += '\n';
  }
  return out;
}

const std::set<std::string, std::less<>> kTestAnnotations = {
    "Test", "ParameterizedTest", "RepeatedTest", "TestFactory", "TestTemplate"};

struct Counts {
  std::string package;
  std::string first_type;
  std::string public_type;
  int imports = 0;
  int tests = 0;
};

Counts count_tokens(const std::vector<java::Token>& toks) {
  Counts c;
  int depth = 0;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.is("{")) ++depth;
    if (t.is("}")) --depth;
    if (depth == 0 && t.is("package") && c.package.empty()) {
      std::string name;
      for (std::size_t j = i + 1; j < toks.size() && !toks[j].is(";"); ++j) name += toks[j].text;
      c.package = name;
    } else if (depth == 0 && t.is("import")) {
      ++c.imports;
    } else if (depth == 0 && (t.is("class") || t.is("interface") || t.is("record") || t.is("enum")) &&
               toks[i + 1].kind == java::TokenKind::Identifier && !(i > 0 && toks[i - 1].is("."))) {
      if (c.first_type.empty()) c.first_type = toks[i + 1].text;
      for (std::size_t j = i; j-- > 0 && !toks[j].is(";") && !toks[j].is("}") && !toks[j].is("{");)
        if (toks[j].is("public") && c.public_type.empty()) c.public_type = toks[i + 1].text;
    } else if (t.kind == java::TokenKind::At) {
      // @Name or @a.b.Name; the last segment decides.
      std::size_t j = i + 1;
      std::string last;
      while (j < toks.size() && toks[j].kind == java::TokenKind::Identifier) {
        last = toks[j].text;
        if (j + 1 < toks.size() && toks[j + 1].is(".")) {
          j += 2;
        } else {
          break;
        }
      }
      if (kTestAnnotations.count(last)) ++c.tests;
    }
  }
  return c;
}

Counts count_lines(const std::string& text) {
  static const std::regex pkg(R"(^\s*package\s+([\w.]+)\s*;)");
  static const std::regex imp(R"(^\s*import\s)");
  static const std::regex type(R"(\b(class|interface|record|enum)\s+(\w+))");
  static const std::regex ann(R"(@(?:[\w]+\.)*(Test|ParameterizedTest|RepeatedTest|TestFactory|TestTemplate)\b)");
  Counts c;
  std::istringstream in(text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (c.package.empty() && std::regex_search(line, m, pkg)) c.package = m[1];
    if (std::regex_search(line, imp)) ++c.imports;
    if (c.first_type.empty() && std::regex_search(line, m, type)) c.first_type = m[2];
    for (auto it = std::sregex_iterator(line.begin(), line.end(), ann); it != std::sregex_iterator(); ++it)
      ++c.tests;
  }
  return c;
}

}  // namespace

LlmParse inspect_llm_output(std::string_view raw) {
  LlmParse r;
  try {
    auto blocks = fenced_blocks(raw);
    if (!blocks.empty()) {
      const Block* best = &blocks[0];
      for (const auto& b : blocks)
        if (b.end - b.begin > best->end - best->begin) best = &b;
      r.text = with_newline(std::string(raw.substr(best->begin, best->end - best->begin)));
    } else {
      r.text = with_newline(strip_prose(raw));
    }
    Counts c;
    try {
      c = count_tokens(java::tokenize(r.text));
    } catch (const Error&) {
      c = count_lines(r.text);
    }
    if (c.tests == 0) {
      r.error = ErrorCode::NoTestFound;
      r.message = "reply contains no recognizable test method";
      return r;
    }
    CandidateTestFile f;
    f.text = r.text;
    f.declared_package = c.package;
    f.import_count = c.imports;
    f.test_method_count = c.tests;
    std::string type = !c.public_type.empty() ? c.public_type
                       : !c.first_type.empty() ? c.first_type
                                               : "GeneratedTest";
    std::string dir = c.package;
    std::replace(dir.begin(), dir.end(), '.', '/');
    f.file_name = (dir.empty() ? "" : dir + "/") + type + ".java";
    if (c.package.empty()) {
      r.error = ErrorCode::NoPackage;
      r.message = "test file has no package declaration";
      return r;
    }
    r.file = std::move(f);
  } catch (const std::exception& e) {
    r.file.reset();
    r.error = ErrorCode::NoTestFound;
    r.message = std::string("reply could not be read: ") + e.what();
  }
  return r;
}

CandidateTestFile parse_llm_output(std::string_view raw) {
  LlmParse r = inspect_llm_output(raw);
  if (r.error) throw Error(*r.error, r.message);
  return std::move(*r.file);
}

fs::path log_prompt(const fs::path& run_dir, std::string_view name, const PromptBundle& bundle) {
  fs::path dir = run_dir / "prompts";
  fs::create_directories(dir);
  fs::path p = dir / (std::string(name) + ".txt");
  std::ofstream out(p, std::ios::binary);
  out << bundle.render();
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return p;
}

}  // namespace stubforge
