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

#include "stubforge/llm_gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"

namespace stubforge {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kPicoPerUsd = 1'000'000'000'000;

std::int64_t pow10(int n) {
  std::int64_t v = 1;
  while (n-- > 0) v *= 10;
  return v;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::InvariantViolation, "cost overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::InvariantViolation, "cost overflow");
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Price fields accept decimal strings or plain JSON numbers; numbers are
// read back through their shortest textual form.
Usd price_from(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  std::string text = v.is_string() ? v.get<std::string>() : v.dump();
  Usd u = Usd::parse(text);
  if (u.pico() < 0) throw Error(ErrorCode::ConfigError, std::string(key) + " must be >= 0");
  if (u.pico() % 1'000'000 != 0)
    throw Error(ErrorCode::ConfigError, std::string(key) + " allows at most six decimals");
  return u;
}

}  // namespace

Usd Usd::parse(std::string_view s) {
  std::string_view in = s;
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  auto digits = [](std::string_view d) {
    return std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || frac.size() > 12 ||
      (dot != std::string_view::npos && frac.empty()))
    throw Error(ErrorCode::ConfigError, "not a decimal amount: '" + std::string(in) + "'");
  std::int64_t w = 0;
  for (char c : whole) w = checked_add(checked_mul(w, 10), c - '0');
  std::int64_t f = 0;
  for (char c : frac) f = f * 10 + (c - '0');
  f *= pow10(12 - static_cast<int>(frac.size()));
  std::int64_t v = checked_add(checked_mul(w, kPicoPerUsd), f);
  return Usd(neg ? -v : v);
}

std::string Usd::format(int places) const {
  places = std::clamp(places, 0, 12);
  std::int64_t unit = pow10(12 - places);
  std::int64_t mag = pico_ < 0 ? -pico_ : pico_;
  std::int64_t q = (mag + unit / 2) / unit;  // half away from zero
  std::int64_t scale = pow10(places);
  std::string out = (pico_ < 0 && q != 0 ? "-" : "") + std::to_string(q / scale);
  if (places > 0) {
    std::string frac = std::to_string(q % scale);
    out += "." + std::string(places - frac.size(), '0') + frac;
  }
  return out;
}

std::string Usd::exact() const {
  std::string s = format(12);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

Usd Usd::operator+(Usd o) const { return Usd(checked_add(pico_, o.pico_)); }

std::vector<ModelConfig> parse_price_table(std::string_view json_text) {
  std::vector<ModelConfig> out;
  try {
    auto j = nlohmann::json::parse(json_text);
    for (const auto& m : j.at("models")) {
      ModelConfig c;
      c.provider_id = m.at("provider").get<std::string>();
      c.model_id = m.at("model").get<std::string>();
      c.input_price_per_million = price_from(m, "input_per_million");
      c.output_price_per_million = price_from(m, "output_per_million");
      if (m.contains("request_params")) c.request_params = m.at("request_params");
      if (!c.request_params.is_object())
        throw Error(ErrorCode::ConfigError, "request_params must be an object");
      c.credential_env = m.value("credential_env", "");
      c.base_url = m.value("base_url", "");
      if (c.provider_id.empty() || c.model_id.empty())
        throw Error(ErrorCode::ConfigError, "provider and model must be non-empty");
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed price table: ") + e.what());
  }
  return out;
}

std::vector<ModelConfig> load_price_table(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::ConfigError, "price table not found: " + path.string());
  return parse_price_table(read_file(path));
}

const ModelConfig* find_model(const std::vector<ModelConfig>& table, std::string_view provider,
                              std::string_view model) {
  for (const auto& m : table)
    if (m.provider_id == provider && m.model_id == model) return &m;
  return nullptr;
}

Usd compute_cost(std::int64_t input_tokens, std::int64_t output_tokens, const ModelConfig& model) {
  if (input_tokens < 0 || output_tokens < 0)
    throw Error(ErrorCode::InvariantViolation, "token counts must be >= 0");
  // Prices hold at most six decimals, so pico / 1e6 is exact.
  std::int64_t in = checked_mul(input_tokens, model.input_price_per_million.pico() / 1'000'000);
  std::int64_t out = checked_mul(output_tokens, model.output_price_per_million.pico() / 1'000'000);
  return Usd::from_pico(checked_add(in, out));
}

std::string_view to_string(CallPhase phase) {
  switch (phase) {
    case CallPhase::Generate:
      return "generate";
    case CallPhase::RepairCompile:
      return "repair_compile";
    case CallPhase::RepairRuntime:
      return "repair_runtime";
  }
  return "generate";
}

nlohmann::ordered_json to_json(const LedgerEntry& e) {
  nlohmann::ordered_json j;
  j["run_id"] = e.run_id;
  j["cut_id"] = e.cut_id;
  j["phase"] = to_string(e.phase);
  j["mode"] = e.mode;
  j["provider"] = e.provider_id;
  j["model"] = e.model_id;
  j["prompt_digest"] = e.prompt_digest;
  j["attempt"] = e.completion.attempt;
  j["input_tokens"] = e.completion.input_tokens;
  j["output_tokens"] = e.completion.output_tokens;
  j["estimated"] = e.completion.estimated;
  j["latency_ms"] = e.completion.latency_ms;
  j["cost_usd"] = e.cost_usd.exact();
  j["text"] = e.completion.text;
  return j;
}

LedgerEntry ledger_entry_from_json(const nlohmann::json& j) {
  LedgerEntry e;
  try {
    e.run_id = j.at("run_id").get<std::string>();
    e.cut_id = j.at("cut_id").get<std::string>();
    e.mode = j.value("mode", "");
    std::string phase = j.at("phase").get<std::string>();
    bool known = false;
    for (auto p : {CallPhase::Generate, CallPhase::RepairCompile, CallPhase::RepairRuntime})
      if (to_string(p) == phase) {
        e.phase = p;
        known = true;
      }
    if (!known) throw Error(ErrorCode::MalformedReport, "unknown phase '" + phase + "'");
    e.provider_id = j.at("provider").get<std::string>();
    e.model_id = j.at("model").get<std::string>();
    e.prompt_digest = j.at("prompt_digest").get<std::string>();
    e.completion.attempt = j.at("attempt").get<int>();
    e.completion.input_tokens = j.at("input_tokens").get<std::int64_t>();
    e.completion.output_tokens = j.at("output_tokens").get<std::int64_t>();
    e.completion.estimated = j.at("estimated").get<bool>();
    e.completion.latency_ms = j.at("latency_ms").get<std::int64_t>();
    e.cost_usd = Usd::parse(j.at("cost_usd").get<std::string>());
    e.completion.text = j.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedReport, std::string("bad ledger entry: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::MalformedReport) throw;
    throw Error(ErrorCode::MalformedReport, ex.what());
  }
  if (e.completion.input_tokens < 0 || e.completion.output_tokens < 0)
    throw Error(ErrorCode::MalformedReport, "negative token count in ledger");
  return e;
}

CostLedger::CostLedger(fs::path jsonl_path) : path_(std::move(jsonl_path)) {
  if (path_->has_parent_path()) fs::create_directories(path_->parent_path());
}

void CostLedger::append(LedgerEntry entry) {
  std::lock_guard lock(mu_);
  if (path_) {
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    out << to_json(entry).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + path_->string());
  }
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> CostLedger::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t CostLedger::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Usd CostLedger::total() const {
  std::lock_guard lock(mu_);
  Usd sum;
  for (const auto& e : entries_) sum += e.cost_usd;
  return sum;
}

std::vector<LedgerEntry> CostLedger::read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::vector<LedgerEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedReport, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    out.push_back(ledger_entry_from_json(j));
  }
  return out;
}

std::chrono::milliseconds RetryPolicy::backoff_before(int next) const {
  double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, next - 2));
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

std::string prompt_digest(const PromptBundle& bundle) {
  std::string text = bundle.render();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::ProviderError, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

ScriptedProvider::ScriptedProvider(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_))
    throw Error(ErrorCode::ConfigError, "script directory not found: " + dir_.string());
}

ProviderReply ScriptedProvider::send(const PromptBundle& bundle, const ModelConfig&,
                                     const CallContext& context) {
  int turn;
  {
    std::lock_guard lock(mu_);
    turn = ++turns_[context.cut_id];
  }
  std::string digest = prompt_digest(bundle);
  fs::path script = dir_ / (digest + ".txt");
  if (!fs::is_regular_file(script)) script = dir_ / context.cut_id / (std::to_string(turn) + ".txt");
  if (!fs::is_regular_file(script))
    throw Error(ErrorCode::ProviderError, "no scripted reply for digest " + digest + " or " +
                                              context.cut_id + " turn " + std::to_string(turn));
  ProviderReply r;
  r.text = read_file(script);
  r.latency_ms = 0;
  fs::path sidecar = fs::path(script).replace_extension(".json");
  if (fs::is_regular_file(sidecar)) {
    try {
      auto j = nlohmann::json::parse(read_file(sidecar));
      if (j.contains("input_tokens")) r.input_tokens = j.at("input_tokens").get<std::int64_t>();
      if (j.contains("output_tokens")) r.output_tokens = j.at("output_tokens").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ProviderError, sidecar.string() + ": " + e.what());
    }
  }
  return r;
}

namespace {

struct Endpoint {
  std::string origin;
  std::string path;
};

Endpoint endpoint_for(const ModelConfig& model, const char* default_origin, const char* path) {
  return {model.base_url.empty() ? default_origin : model.base_url, path};
}

std::string credential(const ModelConfig& model) {
  const char* v = model.credential_env.empty() ? nullptr : std::getenv(model.credential_env.c_str());
  if (!v || !*v)
    throw Error(ErrorCode::AuthMissing, "environment variable " +
                                            (model.credential_env.empty() ? std::string("<unset>")
                                                                          : model.credential_env) +
                                            " holds no credential");
  return v;
}

nlohmann::json post_json(const Endpoint& ep, const httplib::Headers& headers, const nlohmann::json& body) {
  httplib::Client client(ep.origin);
  client.set_connection_timeout(30);
  client.set_read_timeout(600);
  auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res)
    throw Error(ErrorCode::TransientTransport, ep.origin + ": " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw Error(ErrorCode::TransientTransport, ep.origin + " returned HTTP " + std::to_string(res->status));
  if (res->status != 200)
    throw Error(ErrorCode::ProviderError,
                ep.origin + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("unreadable provider response: ") + e.what());
  }
}

}  // namespace

ProviderReply OpenAiProvider::send(const PromptBundle& bundle, const ModelConfig& model,
                                   const CallContext&) {
  std::string key = credential(model);
  nlohmann::json body = model.request_params;
  body["model"] = model.model_id;
  body["messages"] = nlohmann::json::array({{{"role", "system"}, {"content", bundle.system_text}},
                                            {{"role", "user"}, {"content", bundle.render_user()}}});
  auto j = post_json(endpoint_for(model, "https://api.openai.com", "/v1/chat/completions"),
                     {{"Authorization", "Bearer " + key}}, body);
  ProviderReply r;
  try {
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      r.input_tokens = j["usage"].at("prompt_tokens").get<std::int64_t>();
      r.output_tokens = j["usage"].at("completion_tokens").get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("unexpected response shape: ") + e.what());
  }
  return r;
}

ProviderReply AnthropicProvider::send(const PromptBundle& bundle, const ModelConfig& model,
                                      const CallContext&) {
  std::string key = credential(model);
  nlohmann::json body = model.request_params;
  body["model"] = model.model_id;
  if (!body.contains("max_tokens")) body["max_tokens"] = 16000;
  body["system"] = bundle.system_text;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", bundle.render_user()}}});
  auto j = post_json(endpoint_for(model, "https://api.anthropic.com", "/v1/messages"),
                     {{"x-api-key", key}, {"anthropic-version", "2023-06-01"}}, body);
  ProviderReply r;
  try {
    for (const auto& part : j.at("content"))
      if (part.value("type", "") == "text") r.text += part.at("text").get<std::string>();
    if (j.contains("usage")) {
      r.input_tokens = j["usage"].at("input_tokens").get<std::int64_t>();
      r.output_tokens = j["usage"].at("output_tokens").get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("unexpected response shape: ") + e.what());
  }
  return r;
}

LlmGateway::LlmGateway(CostLedger& ledger, TokenEstimator estimator, Sleeper sleeper)
    : ledger_(ledger), estimator_(estimator), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void LlmGateway::register_provider(const std::string& id, std::shared_ptr<Provider> provider,
                                   double requests_per_minute) {
  std::lock_guard lock(mu_);
  Slot s;
  s.provider = std::move(provider);
  if (requests_per_minute > 0)
    s.interval = std::chrono::nanoseconds(static_cast<std::int64_t>(60e9 / requests_per_minute));
  providers_[id] = std::move(s);
}

void LlmGateway::pace(Slot& slot) {
  if (slot.interval.count() == 0) return;
  std::chrono::steady_clock::time_point start;
  {
    std::lock_guard lock(mu_);
    auto now = std::chrono::steady_clock::now();
    start = std::max(now, slot.next);
    slot.next = start + slot.interval;
  }
  auto wait = start - std::chrono::steady_clock::now();
  if (wait.count() > 0) sleeper_(std::chrono::ceil<std::chrono::milliseconds>(wait));
}

Completion LlmGateway::complete(const PromptBundle& bundle, const ModelConfig& model,
                                const RetryPolicy& policy, const CallContext& context) {
  std::string rendered = bundle.render();
  if (bundle.sections.empty() || rendered.find_first_not_of(" \n\t") == std::string::npos)
    throw Error(ErrorCode::ContractBreach, "empty prompt");
  Slot* slot;
  {
    std::lock_guard lock(mu_);
    auto it = providers_.find(model.provider_id);
    if (it == providers_.end())
      throw Error(ErrorCode::ProviderError, "no provider registered as '" + model.provider_id + "'");
    slot = &it->second;
  }
  if (slot->provider->needs_credential()) credential(model);
  std::string digest = prompt_digest(bundle);

  int max_attempts = std::max(1, policy.max_attempts);
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) sleeper_(policy.backoff_before(attempt));
    pace(*slot);
    auto t0 = std::chrono::steady_clock::now();
    ProviderReply reply;
    try {
      reply = slot->provider->send(bundle, model, context);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TransientTransport) throw;
      last_error = e.what();
      continue;
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    Completion c;
    c.text = std::move(reply.text);
    c.attempt = attempt;
    c.latency_ms = reply.latency_ms.value_or(elapsed.count());
    if (reply.input_tokens && reply.output_tokens) {
      c.input_tokens = *reply.input_tokens;
      c.output_tokens = *reply.output_tokens;
    } else {
      c.input_tokens = static_cast<std::int64_t>(estimator_.estimate(rendered));
      c.output_tokens = static_cast<std::int64_t>(estimator_.estimate(c.text));
      c.estimated = true;
    }
    if (c.input_tokens < 0 || c.output_tokens < 0)
      throw Error(ErrorCode::ProviderError, "provider reported negative token counts");
    LedgerEntry entry{context.run_id, context.cut_id, context.phase, model.provider_id, model.model_id,
                      digest, c, compute_cost(c.input_tokens, c.output_tokens, model), context.mode};
    ledger_.append(std::move(entry));
    return c;
  }
  throw Error(ErrorCode::RetriesExhausted,
              std::to_string(max_attempts) + " attempts failed; last: " + last_error);
}

}  // namespace stubforge
