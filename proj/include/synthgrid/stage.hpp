#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "synthgrid/config.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/gateway.hpp"

namespace synthgrid {

/// True when any violation has error severity.
template <class V>
bool has_errors(const std::vector<V>& violations) {
  for (const auto& v : violations) {
    if (v.severity == Severity::Error) return true;
  }
  return false;
}

using WarningSink = std::function<void(const std::string&)>;

/// What a stage runner needs: the resolved config, the gateway (absent for
/// purely external runs) and an HTTP transport for the TMY service.
struct StageContext {
  const RunConfig& config;
  Gateway* gateway = nullptr;
  Transport* http = nullptr;
  WarningSink warn = [](const std::string&) {};
  std::atomic<int> output_retries{0};

  std::filesystem::path out_dir() const { return config.output_dir; }
};

/// Sends messages and hands the response text to accept(). Any OutputError
/// from accept() counts as a bad answer: the request is re-sent up to
/// max_retries times, then StageItemFailure is thrown. Accepted exchanges
/// are recorded as fixtures when a record dir is configured.
template <class Accept>
auto run_with_retries(StageContext& ctx, const std::vector<ChatMessage>& messages, StageId stage,
                      const std::string& item, Accept&& accept) -> decltype(accept(std::string{})) {
  if (ctx.gateway == nullptr) throw Error("stage " + std::string(to_string(stage)) + " needs a model gateway");
  std::string last_error;
  for (int attempt = 0; attempt <= ctx.config.max_retries; ++attempt) {
    if (attempt > 0) ++ctx.output_retries;
    const ChatExchange exchange = ctx.gateway->complete(messages, {stage, item, attempt});
    try {
      auto value = accept(exchange.response_text);
      if (ctx.config.record_dir) record_fixture(exchange, ctx.gateway->params(), *ctx.config.record_dir);
      return value;
    } catch (const OutputError& e) {
      last_error = e.what();
      ctx.warn(std::string(to_string(stage)) + " " + item + " attempt " + std::to_string(attempt) +
               " rejected: " + last_error);
    }
  }
  throw StageItemFailure(std::string(to_string(stage)) + " " + item + " failed after " +
                         std::to_string(ctx.config.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace synthgrid
