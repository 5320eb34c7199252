#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qintent/prompt.hpp"
#include "qintent/query.hpp"

namespace qintent {

class AuthError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};
class RateLimited : public RemoteError {
 public:
  using RemoteError::RemoteError;
};
class Timeout : public RemoteError {
 public:
  using RemoteError::RemoteError;
};
class MalformedResponse : public RemoteError {
 public:
  using RemoteError::RemoteError;
};
/// 4xx other than auth and rate limiting; never retried.
class RequestRejected : public RemoteError {
 public:
  using RemoteError::RemoteError;
};
/// 5xx after retries ran out.
class ServerError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};
/// Connection-level failure after retries ran out.
class TransportError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

/// Chat-completion endpoint settings. The API key itself is never stored
/// here, only the name of the environment variable holding it.
struct ModelEndpoint {
  std::string base_url;  // scheme://host[:port][/path-prefix]
  std::string model;
  std::string api_key_env = "QINTENT_API_KEY";
  std::chrono::milliseconds timeout{30'000};
  int max_retries = 4;
  int max_concurrent = 4;
  double temperature = 0.0;
  std::optional<int> max_tokens;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_max{20'000};
  std::uint64_t jitter_seed = 0;

  static ModelEndpoint from_json(const nlohmann::ordered_json& j);
  static ModelEndpoint load(const std::string& path);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Exponential backoff with equal jitter: attempt k waits
/// cap/2 + U * cap/2 where cap = min(max, base * 2^(k-1)). U comes from a
/// hash of (seed, request key, attempt), so the schedule is reproducible.
class BackoffSchedule {
 public:
  BackoffSchedule(std::chrono::milliseconds base, std::chrono::milliseconds max, std::uint64_t seed)
      : base_(base), max_(max), seed_(seed) {}

  std::chrono::milliseconds delay(int attempt, std::uint64_t request_key) const;

 private:
  std::chrono::milliseconds base_;
  std::chrono::milliseconds max_;
  std::uint64_t seed_;
};

struct RawResponse {
  std::string text;
  std::chrono::milliseconds latency{0};
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
  int attempts = 0;
};

class LlmClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// Reads the key from `ep.api_key_env` unless one is passed in.
  /// Throws AuthError when no key is available.
  explicit LlmClient(ModelEndpoint ep, std::optional<std::string> api_key = std::nullopt);

  /// One chat completion with a single user message. Retries transport
  /// errors, 429 and 5xx; 401/403 and other 4xx fail immediately.
  RawResponse complete(std::string_view prompt, std::uint64_t request_key = 0) const;

  const ModelEndpoint& endpoint() const noexcept { return ep_; }
  void set_sleeper(Sleeper s) { sleep_ = std::move(s); }

 private:
  ModelEndpoint ep_;
  std::string api_key_;
  std::string scheme_host_port_;
  std::string path_;
  BackoffSchedule backoff_;
  Sleeper sleep_;
};

struct BatchItem {
  std::string query_id;
  std::string query;
  std::optional<IntentLabel> label;  // empty on OOV or remote failure
  std::string raw;
  std::string error;                 // "" on success
  bool oov = false;
  int attempts = 0;
  double latency_ms = 0.0;
};

struct BatchReport {
  std::string scenario;
  std::size_t total = 0;
  std::size_t parsed = 0;
  std::size_t oov_count = 0;
  std::size_t error_count = 0;
  double total_latency_ms = 0.0;
  double wall_seconds = 0.0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int max_concurrent = 1;
  std::vector<std::pair<std::string, std::string>> errors;  // (query id, message)

  nlohmann::ordered_json to_json() const;
};

struct BatchResult {
  std::vector<BatchItem> items;  // same order as the input queries
  BatchReport report;
};

/// render -> complete -> parse_response for every query with at most
/// endpoint().max_concurrent requests in flight. Individual failures are
/// recorded, never thrown.
BatchResult classify_batch(const LlmClient& client, Scenario s, std::span<const Query> queries,
                           const PromptAssets& assets = PromptAssets::builtin());

/// JSONL record for one batch item. Parsed items carry confidence 1 and
/// provenance llm_icl; failed ones a null label plus "error" and "raw".
nlohmann::ordered_json to_json(const BatchItem& item);

}  // namespace qintent
