#include "qintent/llm_client.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "qintent/assets.hpp"
#include "qintent/rng.hpp"

namespace qintent {

using nlohmann::ordered_json;

ModelEndpoint ModelEndpoint::from_json(const ordered_json& j) {
  if (!j.is_object()) throw DataError("endpoint config must be a JSON object");
  ModelEndpoint ep;
  try {
    ep.base_url = j.at("base_url").get<std::string>();
    ep.model = j.at("model").get<std::string>();
    ep.api_key_env = j.value("api_key_env", ep.api_key_env);
    ep.timeout = std::chrono::milliseconds(j.value("timeout_ms", ep.timeout.count()));
    ep.max_retries = j.value("max_retries", ep.max_retries);
    ep.max_concurrent = j.value("max_concurrent", ep.max_concurrent);
    ep.temperature = j.value("temperature", ep.temperature);
    if (j.contains("max_tokens")) ep.max_tokens = j["max_tokens"].get<int>();
    ep.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", ep.backoff_base.count()));
    ep.backoff_max = std::chrono::milliseconds(j.value("backoff_max_ms", ep.backoff_max.count()));
    ep.jitter_seed = j.value("jitter_seed", ep.jitter_seed);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("endpoint config: ") + e.what());
  }
  ep.validate();
  return ep;
}

ModelEndpoint ModelEndpoint::load(const std::string& path) {
  auto j = ordered_json::parse(assets::load_text(path), nullptr, false);
  if (j.is_discarded()) throw DataError(path + ": malformed JSON");
  return from_json(j);
}

ordered_json ModelEndpoint::to_json() const {
  ordered_json j;
  j["base_url"] = base_url;
  j["model"] = model;
  j["api_key_env"] = api_key_env;
  j["timeout_ms"] = timeout.count();
  j["max_retries"] = max_retries;
  j["max_concurrent"] = max_concurrent;
  j["temperature"] = temperature;
  if (max_tokens) j["max_tokens"] = *max_tokens;
  j["backoff_base_ms"] = backoff_base.count();
  j["backoff_max_ms"] = backoff_max.count();
  j["jitter_seed"] = jitter_seed;
  return j;
}

void ModelEndpoint::validate() const {
  if (base_url.empty()) throw DataError("endpoint base_url is empty");
  if (model.empty()) throw DataError("endpoint model is empty");
  if (max_concurrent < 1) throw DataError("max_concurrent must be >= 1");
  if (max_retries < 0) throw DataError("max_retries must be >= 0");
  if (timeout.count() <= 0) throw DataError("timeout_ms must be positive");
  if (backoff_base.count() < 0 || backoff_max < backoff_base)
    throw DataError("backoff_base_ms must be >= 0 and <= backoff_max_ms");
}

std::chrono::milliseconds BackoffSchedule::delay(int attempt, std::uint64_t request_key) const {
  const int shift = std::clamp(attempt - 1, 0, 30);
  const auto cap = std::min<std::int64_t>(max_.count(), base_.count() << shift);
  const double u = unit_interval(derive_seed(seed_ ^ mix64(request_key), static_cast<std::uint64_t>(attempt)));
  return std::chrono::milliseconds(cap / 2 + static_cast<std::int64_t>(u * (cap - cap / 2)));
}

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw DataError("base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

bool is_timeout(httplib::Error e) {
  return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read;
}

}  // namespace

LlmClient::LlmClient(ModelEndpoint ep, std::optional<std::string> api_key)
    : ep_(std::move(ep)),
      backoff_(ep_.backoff_base, ep_.backoff_max, ep_.jitter_seed),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  ep_.validate();
  if (api_key) {
    api_key_ = std::move(*api_key);
  } else if (const char* env = std::getenv(ep_.api_key_env.c_str()); env && *env) {
    api_key_ = env;
  }
  if (api_key_.empty())
    throw AuthError("no API key: environment variable " + ep_.api_key_env + " is not set");
  std::tie(scheme_host_port_, path_) = split_url(ep_.base_url);
}

RawResponse LlmClient::complete(std::string_view prompt, std::uint64_t request_key) const {
  ordered_json body;
  body["model"] = ep_.model;
  body["messages"] = ordered_json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
  body["temperature"] = ep_.temperature;
  if (ep_.max_tokens) body["max_tokens"] = *ep_.max_tokens;
  const std::string payload = body.dump();
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  const auto t0 = std::chrono::steady_clock::now();
  std::string last_error;
  enum class Last { None, Transport, Timeout, RateLimited, Server } last = Last::None;

  for (int attempt = 1; attempt <= ep_.max_retries + 1; ++attempt) {
    httplib::Client cli(scheme_host_port_);
    const auto secs = ep_.timeout.count() / 1000;
    const auto usecs = (ep_.timeout.count() % 1000) * 1000;
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    auto res = cli.Post(path_ + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      last = is_timeout(res.error()) ? Last::Timeout : Last::Transport;
      last_error = httplib::to_string(res.error());
    } else if (res->status == 200) {
      auto j = ordered_json::parse(res->body, nullptr, false);
      const ordered_json* content = nullptr;
      if (!j.is_discarded() && j.contains("choices") && j["choices"].is_array() &&
          !j["choices"].empty()) {
        const auto& c0 = j["choices"][0];
        if (c0.contains("message") && c0["message"].contains("content") &&
            c0["message"]["content"].is_string())
          content = &c0["message"]["content"];
      }
      if (!content) throw MalformedResponse("response lacks choices[0].message.content");
      RawResponse r;
      r.text = content->get<std::string>();
      r.attempts = attempt;
      r.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0);
      if (j.contains("usage") && j["usage"].is_object()) {
        const auto& u = j["usage"];
        if (u.contains("prompt_tokens")) r.prompt_tokens = u["prompt_tokens"].get<std::int64_t>();
        if (u.contains("completion_tokens"))
          r.completion_tokens = u["completion_tokens"].get<std::int64_t>();
      }
      return r;
    } else if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
    } else if (res->status == 429) {
      last = Last::RateLimited;
      last_error = "HTTP 429";
    } else if (res->status >= 500) {
      last = Last::Server;
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw RequestRejected("endpoint rejected the request (HTTP " + std::to_string(res->status) + ")");
    }
    if (attempt <= ep_.max_retries) sleep_(backoff_.delay(attempt, request_key));
  }

  const std::string msg = last_error + " after " + std::to_string(ep_.max_retries + 1) + " attempts";
  switch (last) {
    case Last::RateLimited:
      throw RateLimited("rate limited: " + msg);
    case Last::Timeout:
      throw Timeout("timed out: " + msg);
    case Last::Server:
      throw ServerError("server error: " + msg);
    default:
      throw TransportError("transport error: " + msg);
  }
}

// ---------------------------------------------------------------------------

ordered_json BatchReport::to_json() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["total"] = total;
  j["parsed"] = parsed;
  j["oov_count"] = oov_count;
  j["error_count"] = error_count;
  j["total_latency_ms"] = total_latency_ms;
  j["wall_seconds"] = wall_seconds;
  j["prompt_tokens"] = prompt_tokens;
  j["completion_tokens"] = completion_tokens;
  j["max_concurrent"] = max_concurrent;
  ordered_json errs = ordered_json::array();
  for (const auto& [id, msg] : errors) errs.push_back({{"id", id}, {"error", msg}});
  j["errors"] = std::move(errs);
  return j;
}

ordered_json to_json(const BatchItem& item) {
  ordered_json j;
  j["id"] = item.query_id;
  j["query"] = item.query;
  if (item.label) {
    j["label"] = std::string(to_string(*item.label));
    j["confidence"] = 1.0;
  } else {
    j["label"] = nullptr;
  }
  j["provenance"] = std::string(to_string(Provenance::LlmIcl));
  j["raw"] = item.raw;
  if (!item.error.empty()) j["error"] = item.error;
  return j;
}

BatchResult classify_batch(const LlmClient& client, Scenario s, std::span<const Query> queries,
                           const PromptAssets& assets) {
  const auto t0 = std::chrono::steady_clock::now();
  BatchResult out;
  out.items.resize(queries.size());
  std::vector<std::int64_t> ptoks(queries.size(), 0), ctoks(queries.size(), 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
      auto& item = out.items[i];
      item.query_id = queries[i].id();
      item.query = queries[i].text();
      try {
        const auto prompt = render(s, queries[i], assets);
        const auto resp = client.complete(prompt, i);
        item.raw = resp.text;
        item.attempts = resp.attempts;
        item.latency_ms = static_cast<double>(resp.latency.count());
        ptoks[i] = resp.prompt_tokens.value_or(0);
        ctoks[i] = resp.completion_tokens.value_or(0);
        item.label = parse_response(resp.text);
      } catch (const OutOfVocabularyLabel&) {
        item.oov = true;
        item.error = "oov";
      } catch (const std::exception& e) {
        item.error = e.what();
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(client.endpoint().max_concurrent,
                                                  static_cast<int>(queries.size())));
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  auto& rep = out.report;
  rep.scenario = std::string(to_string(s));
  rep.total = queries.size();
  rep.max_concurrent = client.endpoint().max_concurrent;
  for (std::size_t i = 0; i < out.items.size(); ++i) {
    const auto& item = out.items[i];
    rep.total_latency_ms += item.latency_ms;
    rep.prompt_tokens += ptoks[i];
    rep.completion_tokens += ctoks[i];
    if (item.label) {
      ++rep.parsed;
    } else if (item.oov) {
      ++rep.oov_count;
      rep.errors.emplace_back(item.query_id, "out-of-vocabulary response");
    } else {
      ++rep.error_count;
      rep.errors.emplace_back(item.query_id, item.error);
      spdlog::warn("query {}: {}", item.query_id, item.error);
    }
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace qintent
