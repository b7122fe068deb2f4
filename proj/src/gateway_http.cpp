// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include "sdoh/gateway.hpp"

namespace sdoh {

OpenAiHttpBackend::OpenAiHttpBackend(Options options) : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw Error(ErrorCode::ConfigError, "live backend needs an endpoint URL");
  }
}

nlohmann::json OpenAiHttpBackend::request_body(const CompletionRequest& request) const {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : request.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  nlohmann::json body = {{"model", request.model_tag.empty() ? options_.model : request.model_tag},
                         {"messages", msgs},
                         {"temperature", request.temperature},
                         {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

std::string OpenAiHttpBackend::complete(const CompletionRequest& request) {
  httplib::Client client(options_.base_url);
  const auto timeout = std::chrono::duration<double>(options_.timeout_seconds);
  const auto timeout_ms = std::chrono::duration_cast<std::chrono::milliseconds>(timeout);
  client.set_connection_timeout(timeout_ms);
  client.set_read_timeout(timeout_ms);
  client.set_write_timeout(timeout_ms);

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    if (options_.auth_style == "api-key") {
      headers.emplace("api-key", options_.api_key);
    } else {
      headers.emplace("Authorization", "Bearer " + options_.api_key);
    }
  }

  auto result = client.Post(options_.path, headers, request_body(request).dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::Timeout, "request timed out: " + httplib::to_string(err));
    }
    throw ProviderError("transport failure: " + httplib::to_string(err), true);
  }
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw ProviderError("provider returned HTTP " + std::to_string(status), true);
  }
  if (status != 200) {
    throw ProviderError("provider returned HTTP " + std::to_string(status) + ": " + result->body,
                        false);
  }
  try {
    const auto doc = nlohmann::json::parse(result->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed completion response: ") + e.what(), false);
  }
}

}  // namespace sdoh
