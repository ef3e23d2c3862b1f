#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "synthgrid/types.hpp"

namespace synthgrid {

// ---- transport ------------------------------------------------------------

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{60'000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Blocking HTTP. Implementations throw TransportError when no response
/// arrives at all; any received status is returned as-is.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Real network access through cpp-httplib (HTTPS via OpenSSL).
class HttpTransport final : public Transport {
 public:
  HttpResponse send(const HttpRequest& request) override;
};

/// Fails every call with NetworkDisabled and counts the attempts.
class OfflineTransport final : public Transport {
 public:
  HttpResponse send(const HttpRequest& request) override;
  int attempts() const { return attempts_.load(); }

 private:
  std::atomic<int> attempts_{0};
};

// ---- chat -----------------------------------------------------------------

struct ChatParams {
  std::string model_id;
  double temperature = 0.7;
  int max_tokens = 8192;
};

struct ChatExchange {
  std::vector<ChatMessage> request_messages;
  std::string response_text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::chrono::milliseconds latency{0};
  std::string model_id;
  std::chrono::system_clock::time_point timestamp{};
};

std::string format_timestamp(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_timestamp(std::string_view text);

/// Canonical request form: messages with whitespace-normalized content plus
/// the decoding parameters, serialized with sorted keys.
std::string canonical_request(const std::vector<ChatMessage>& messages, const ChatParams& params);

/// Hex SHA-256 of canonical_request(); the fixture key.
std::string request_digest(const std::vector<ChatMessage>& messages, const ChatParams& params);

std::string sha256_hex(std::string_view data);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// One attempt. Throws TransportError (retryable), ApiError, FixtureMissing.
  virtual ChatExchange complete(const std::vector<ChatMessage>& messages, const ChatParams& params) = 0;
};

/// POST {endpoint}/chat/completions on an OpenAI-compatible service.
class OpenAiBackend final : public ChatBackend {
 public:
  OpenAiBackend(Transport& transport, std::string endpoint_url, std::string api_key,
                std::chrono::milliseconds timeout = std::chrono::minutes(10));
  ChatExchange complete(const std::vector<ChatMessage>& messages, const ChatParams& params) override;

  static std::string request_body(const std::vector<ChatMessage>& messages, const ChatParams& params);

 private:
  Transport& transport_;
  std::string endpoint_url_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

/// Serves recorded exchanges from a fixture directory; never touches the network.
class ReplayBackend final : public ChatBackend {
 public:
  explicit ReplayBackend(std::filesystem::path fixture_dir);
  ChatExchange complete(const std::vector<ChatMessage>& messages, const ChatParams& params) override;

 private:
  std::filesystem::path dir_;
};

/// Persists an exchange as `<digest>.json` in dir and returns the digest.
/// Idempotent for identical content; throws FixtureConflict otherwise.
std::string record_fixture(const ChatExchange& exchange, const ChatParams& params, const std::filesystem::path& dir);

// ---- exchange log -----------------------------------------------------------

struct LoggedExchange {
  StageId stage = StageId::FamilyTypes;
  std::string item;
  int attempt = 0;
  std::string request_digest;
  ChatExchange exchange;
};

/// Append-only, thread-safe record of every response received in a run.
class ExchangeLog {
 public:
  void append(LoggedExchange entry);
  /// Sorted by (stage, item, attempt); later appends replace equal keys.
  std::vector<LoggedExchange> entries() const;
  std::size_t size() const;

  /// Merges a previously saved log (missing file is not an error).
  void load(const std::filesystem::path& path);
  /// JSON lines, sorted; deterministic for identical content.
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mutex_;
  std::vector<LoggedExchange> entries_;
};

// ---- retries ---------------------------------------------------------------

/// Exponential backoff on TransportError: base, base*factor, ... each with
/// +/- jitter.
struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{2000};
  double factor = 2.0;
  double jitter = 0.2;

  std::chrono::milliseconds delay_for(int retry_index, std::mt19937_64& rng) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

struct ExchangeTag {
  StageId stage = StageId::FamilyTypes;
  std::string item;
  int attempt = 0;
};

/// Backend + retry policy + logging. Safe to call concurrently.
class Gateway {
 public:
  Gateway(ChatBackend& backend, ChatParams params, RetryPolicy policy, Sleeper sleeper, ExchangeLog* log,
          std::uint64_t seed = 0x5eed);

  ChatExchange complete(const std::vector<ChatMessage>& messages, const ExchangeTag& tag);

  const ChatParams& params() const { return params_; }
  int transport_retries() const { return transport_retries_.load(); }

 private:
  ChatBackend& backend_;
  ChatParams params_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  ExchangeLog* log_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
  std::atomic<int> transport_retries_{0};
};

}  // namespace synthgrid
