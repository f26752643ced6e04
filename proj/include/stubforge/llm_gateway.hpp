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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stubforge/promptkit.hpp"

namespace stubforge {

/// Exact dollar amount in units of 1e-12 USD. A price per million tokens
/// with up to six decimals times a token count is always a whole number of
/// these units, so costs never round.
class Usd {
 public:
  constexpr Usd() = default;
  static constexpr Usd from_pico(std::int64_t pico) { return Usd(pico); }
  /// "0.15", "12", "-0.000001". At most 12 fractional digits.
  static Usd parse(std::string_view decimal);

  constexpr std::int64_t pico() const { return pico_; }
  /// Rounded half away from zero to `places` decimals.
  std::string format(int places = 4) const;
  /// All significant decimals, e.g. "0.00761775".
  std::string exact() const;
  double to_double() const { return static_cast<double>(pico_) / 1e12; }

  Usd operator+(Usd o) const;
  Usd& operator+=(Usd o) { return *this = *this + o; }
  auto operator<=>(const Usd&) const = default;

 private:
  constexpr explicit Usd(std::int64_t p) : pico_(p) {}
  std::int64_t pico_ = 0;
};

struct ModelConfig {
  std::string provider_id;
  std::string model_id;
  Usd input_price_per_million;
  Usd output_price_per_million;
  nlohmann::json request_params = nlohmann::json::object();
  std::string credential_env;  // name of the variable holding the API key
  std::string base_url;        // empty: the provider's public endpoint
};

/// Reads the price table; throws ConfigError on a negative price or a
/// malformed entry.
std::vector<ModelConfig> load_price_table(const std::filesystem::path& path);
std::vector<ModelConfig> parse_price_table(std::string_view json_text);
const ModelConfig* find_model(const std::vector<ModelConfig>& table, std::string_view provider,
                              std::string_view model);

Usd compute_cost(std::int64_t input_tokens, std::int64_t output_tokens, const ModelConfig& model);

struct Completion {
  std::string text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t latency_ms = 0;
  int attempt = 1;
  bool estimated = false;  // token counts came from the estimator

  bool operator==(const Completion&) const = default;
};

enum class CallPhase { Generate, RepairCompile, RepairRuntime };
std::string_view to_string(CallPhase phase);

struct CallContext {
  std::string run_id;
  std::string cut_id;
  CallPhase phase = CallPhase::Generate;
  std::string mode;  // generation mode, e.g. "mock_informed" or "baseline"
};

struct LedgerEntry {
  std::string run_id;
  std::string cut_id;
  CallPhase phase = CallPhase::Generate;
  std::string provider_id;
  std::string model_id;
  std::string prompt_digest;
  Completion completion;
  Usd cost_usd;
  std::string mode;

  bool operator==(const LedgerEntry&) const = default;
};

nlohmann::ordered_json to_json(const LedgerEntry& e);
LedgerEntry ledger_entry_from_json(const nlohmann::json& j);

/// Append-only, thread-safe. With a path, every entry is also appended to
/// that JSONL file as it is recorded.
class CostLedger {
 public:
  CostLedger() = default;
  explicit CostLedger(std::filesystem::path jsonl_path);

  void append(LedgerEntry entry);
  std::vector<LedgerEntry> entries() const;
  std::size_t size() const;
  Usd total() const;

  /// Throws MalformedReport on a bad line.
  static std::vector<LedgerEntry> read_jsonl(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
  std::optional<std::filesystem::path> path_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  double multiplier = 2.0;

  /// Delay before attempt `next` (2, 3, ...).
  std::chrono::milliseconds backoff_before(int next) const;
};

/// What a provider call returns. Token counts are absent when the provider
/// does not report them.
struct ProviderReply {
  std::string text;
  std::optional<std::int64_t> input_tokens;
  std::optional<std::int64_t> output_tokens;
  std::optional<std::int64_t> latency_ms;  // fixed latency for replayed replies
};

/// A completion backend. Throw Error(TransientTransport) for failures worth
/// retrying and Error(ProviderError) for the rest.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderReply send(const PromptBundle& bundle, const ModelConfig& model,
                             const CallContext& context) = 0;
  virtual bool needs_credential() const { return false; }
};

/// Replays canned replies from a directory. A reply is looked up as
/// `<digest>.txt`, then `<cut_id>/<n>.txt` for the n-th call for that CUT.
/// An optional `.json` sidecar with the same stem holds
/// {"input_tokens", "output_tokens"}.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::filesystem::path dir);
  ProviderReply send(const PromptBundle& bundle, const ModelConfig& model,
                     const CallContext& context) override;

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<std::string, int> turns_;
};

/// Chat-completions style HTTP API.
class OpenAiProvider : public Provider {
 public:
  ProviderReply send(const PromptBundle& bundle, const ModelConfig& model,
                     const CallContext& context) override;
  bool needs_credential() const override { return true; }
};

/// Messages style HTTP API.
class AnthropicProvider : public Provider {
 public:
  ProviderReply send(const PromptBundle& bundle, const ModelConfig& model,
                     const CallContext& context) override;
  bool needs_credential() const override { return true; }
};

/// Lowercase hex SHA-256 of the rendered bundle.
std::string prompt_digest(const PromptBundle& bundle);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class LlmGateway {
 public:
  explicit LlmGateway(CostLedger& ledger, TokenEstimator estimator = {}, Sleeper sleeper = {});

  /// `requests_per_minute` of 0 means unlimited.
  void register_provider(const std::string& id, std::shared_ptr<Provider> provider,
                         double requests_per_minute = 0);

  /// Sends the bundle, retrying transient failures, and records the call.
  /// Throws AuthMissing, ProviderError or RetriesExhausted.
  Completion complete(const PromptBundle& bundle, const ModelConfig& model, const RetryPolicy& policy,
                      const CallContext& context);

  CostLedger& ledger() { return ledger_; }

 private:
  struct Slot {
    std::shared_ptr<Provider> provider;
    std::chrono::nanoseconds interval{0};
    std::chrono::steady_clock::time_point next{};
  };
  void pace(Slot& slot);

  CostLedger& ledger_;
  TokenEstimator estimator_;
  Sleeper sleeper_;
  std::mutex mu_;
  std::map<std::string, Slot> providers_;
};

}  // namespace stubforge
