#include "synthgrid/gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"

namespace synthgrid {
namespace fs = std::filesystem;
using nlohmann::json;

HttpResponse OfflineTransport::send(const HttpRequest& request) {
  ++attempts_;
  throw NetworkDisabled("network access disabled (replay mode): " + request.method + " " + request.url);
}

// ---- time -------------------------------------------------------------------

std::string format_timestamp(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms >= 0 ? ms / 1000 : (ms - 999) / 1000);
  const int frac = static_cast<int>(ms - static_cast<long long>(secs) * 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

std::chrono::system_clock::time_point parse_timestamp(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d.%dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                  &tm.tm_sec, &ms) < 6) {
    throw ParseError("bad timestamp '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t secs = timegm(&tm);
  return std::chrono::system_clock::time_point(std::chrono::seconds(secs)) + std::chrono::milliseconds(ms);
}

// ---- digest -----------------------------------------------------------------

namespace {

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

json canonical_json(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", normalize_whitespace(m.content)}});
  }
  return {{"model", params.model_id},
          {"temperature", params.temperature},
          {"max_tokens", params.max_tokens},
          {"messages", msgs}};
}

json exchange_fixture_json(const ChatExchange& ex, const ChatParams& params, const std::string& key) {
  return {{"key", key},
          {"request", canonical_json(ex.request_messages, params)},
          {"response_text", ex.response_text},
          {"prompt_tokens", ex.prompt_tokens},
          {"completion_tokens", ex.completion_tokens},
          {"latency_ms", ex.latency.count()},
          {"model_id", ex.model_id},
          {"timestamp", format_timestamp(ex.timestamp)}};
}

bool same_fixture(const json& a, const json& b) {
  for (const char* k : {"response_text", "prompt_tokens", "completion_tokens", "latency_ms", "request"}) {
    if (a.value(k, json()) != b.value(k, json())) return false;
  }
  return true;
}

}  // namespace

std::string canonical_request(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  return canonical_json(messages, params).dump();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string request_digest(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  return sha256_hex(canonical_request(messages, params));
}

// ---- OpenAI-compatible backend ---------------------------------------------

OpenAiBackend::OpenAiBackend(Transport& transport, std::string endpoint_url, std::string api_key,
                             std::chrono::milliseconds timeout)
    : transport_(transport), endpoint_url_(std::move(endpoint_url)), api_key_(std::move(api_key)), timeout_(timeout) {
  while (!endpoint_url_.empty() && endpoint_url_.back() == '/') endpoint_url_.pop_back();
}

std::string OpenAiBackend::request_body(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  return json{{"model", params.model_id},
              {"messages", msgs},
              {"temperature", params.temperature},
              {"max_tokens", params.max_tokens}}
      .dump();
}

ChatExchange OpenAiBackend::complete(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  HttpRequest req;
  req.method = "POST";
  req.url = endpoint_url_ + "/chat/completions";
  req.headers = {{"Content-Type", "application/json"}};
  if (!api_key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + api_key_);
  req.body = request_body(messages, params);
  req.timeout = timeout_;

  const auto started = std::chrono::steady_clock::now();
  const auto sent_at = std::chrono::system_clock::now();
  const HttpResponse resp = transport_.send(req);
  const auto latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

  if (resp.status == 429 || resp.status >= 500) {
    throw TransportError("HTTP " + std::to_string(resp.status) + " from " + req.url, resp.status);
  }
  if (resp.status < 200 || resp.status >= 300) throw ApiError(resp.status, resp.body);

  ChatExchange ex;
  ex.request_messages = messages;
  ex.latency = latency;
  ex.timestamp = sent_at;
  try {
    const auto doc = json::parse(resp.body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ApiError(resp.status, "response has no text content");
    ex.response_text = content.get<std::string>();
    ex.model_id = doc.value("model", params.model_id);
    if (doc.contains("usage") && doc["usage"].is_object()) {
      ex.prompt_tokens = doc["usage"].value("prompt_tokens", std::int64_t{0});
      ex.completion_tokens = doc["usage"].value("completion_tokens", std::int64_t{0});
    }
  } catch (const json::exception& e) {
    throw ApiError(resp.status, std::string("malformed completion payload: ") + e.what());
  }
  return ex;
}

// ---- replay ------------------------------------------------------------------

ReplayBackend::ReplayBackend(fs::path fixture_dir) : dir_(std::move(fixture_dir)) {}

ChatExchange ReplayBackend::complete(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  const auto key = request_digest(messages, params);
  const auto path = dir_ / (key + ".json");
  if (!fs::exists(path)) throw FixtureMissing(key);
  try {
    const auto doc = json::parse(read_text_file(path));
    ChatExchange ex;
    ex.request_messages = messages;
    ex.response_text = doc.at("response_text").get<std::string>();
    ex.prompt_tokens = doc.at("prompt_tokens").get<std::int64_t>();
    ex.completion_tokens = doc.at("completion_tokens").get<std::int64_t>();
    ex.latency = std::chrono::milliseconds(doc.at("latency_ms").get<std::int64_t>());
    ex.model_id = doc.value("model_id", params.model_id);
    ex.timestamp = parse_timestamp(doc.at("timestamp").get<std::string>());
    return ex;
  } catch (const json::exception& e) {
    throw IoError("corrupt fixture " + path.string() + ": " + e.what());
  }
}

std::string record_fixture(const ChatExchange& exchange, const ChatParams& params, const fs::path& dir) {
  const auto key = request_digest(exchange.request_messages, params);
  const auto path = dir / (key + ".json");
  const auto doc = exchange_fixture_json(exchange, params, key);
  if (publish_once(path, doc.dump(2) + "\n")) return key;
  json existing;
  try {
    existing = json::parse(read_text_file(path));
  } catch (const json::exception&) {
    throw FixtureConflict(key);
  }
  if (!same_fixture(existing, doc)) throw FixtureConflict(key);
  return key;
}

// ---- exchange log --------------------------------------------------------------

namespace {

auto log_key(const LoggedExchange& e) { return std::tie(e.stage, e.item, e.attempt); }

json log_entry_json(const LoggedExchange& e) {
  return {{"stage", std::string(to_string(e.stage))},
          {"item", e.item},
          {"attempt", e.attempt},
          {"request_digest", e.request_digest},
          {"model_id", e.exchange.model_id},
          {"prompt_tokens", e.exchange.prompt_tokens},
          {"completion_tokens", e.exchange.completion_tokens},
          {"latency_ms", e.exchange.latency.count()},
          {"timestamp", format_timestamp(e.exchange.timestamp)},
          {"response_text", e.exchange.response_text}};
}

}  // namespace

void ExchangeLog::append(LoggedExchange entry) {
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<LoggedExchange> ExchangeLog::entries() const {
  std::vector<LoggedExchange> copy;
  {
    std::lock_guard lock(mutex_);
    copy = entries_;
  }
  // Stable so that the last append wins among equal keys.
  std::stable_sort(copy.begin(), copy.end(), [](const auto& a, const auto& b) { return log_key(a) < log_key(b); });
  std::vector<LoggedExchange> out;
  for (auto& e : copy) {
    if (!out.empty() && log_key(out.back()) == log_key(e)) {
      out.back() = std::move(e);
    } else {
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::size_t ExchangeLog::size() const { return entries().size(); }

void ExchangeLog::load(const fs::path& path) {
  if (!fs::exists(path)) return;
  std::vector<LoggedExchange> loaded;
  for (const auto& line : read_lines(path)) {
    try {
      const auto doc = json::parse(line);
      LoggedExchange e;
      e.stage = parse_stage(doc.at("stage").get<std::string>());
      e.item = doc.at("item").get<std::string>();
      e.attempt = doc.at("attempt").get<int>();
      e.request_digest = doc.value("request_digest", "");
      e.exchange.model_id = doc.value("model_id", "");
      e.exchange.prompt_tokens = doc.at("prompt_tokens").get<std::int64_t>();
      e.exchange.completion_tokens = doc.at("completion_tokens").get<std::int64_t>();
      e.exchange.latency = std::chrono::milliseconds(doc.at("latency_ms").get<std::int64_t>());
      e.exchange.timestamp = parse_timestamp(doc.at("timestamp").get<std::string>());
      e.exchange.response_text = doc.value("response_text", "");
      loaded.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw IoError("corrupt exchange log " + path.string() + ": " + e.what());
    }
  }
  std::lock_guard lock(mutex_);
  entries_.insert(entries_.begin(), loaded.begin(), loaded.end());
}

void ExchangeLog::save(const fs::path& path) const {
  std::string out;
  for (const auto& e : entries()) out += log_entry_json(e).dump() + "\n";
  write_text_file(path, out);
}

// ---- retries -------------------------------------------------------------------

std::chrono::milliseconds RetryPolicy::delay_for(int retry_index, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> dist(-jitter, jitter);
  const double scale = std::pow(factor, retry_index) * (1.0 + dist(rng));
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(base_delay.count() * scale)));
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Gateway::Gateway(ChatBackend& backend, ChatParams params, RetryPolicy policy, Sleeper sleeper, ExchangeLog* log,
                 std::uint64_t seed)
    : backend_(backend),
      params_(std::move(params)),
      policy_(policy),
      sleeper_(std::move(sleeper)),
      log_(log),
      rng_(seed) {}

ChatExchange Gateway::complete(const std::vector<ChatMessage>& messages, const ExchangeTag& tag) {
  for (int retry = 0;; ++retry) {
    try {
      ChatExchange ex = backend_.complete(messages, params_);
      if (log_ != nullptr) {
        log_->append({tag.stage, tag.item, tag.attempt, request_digest(messages, params_), ex});
      }
      return ex;
    } catch (const TransportError&) {
      if (retry >= policy_.max_retries) throw;
      std::chrono::milliseconds delay;
      {
        std::lock_guard lock(rng_mutex_);
        delay = policy_.delay_for(retry, rng_);
      }
      ++transport_retries_;
      if (sleeper_) sleeper_(delay);
    }
  }
}

}  // namespace synthgrid
