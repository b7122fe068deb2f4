// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sdoh/error.hpp"

namespace sdoh {

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct CompletionRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  int max_tokens = 1024;
  std::string model_tag;

  /// Throws InvalidArgument on empty messages, temperature outside [0, 2] or
  /// non-positive max_tokens.
  void validate() const;
  nlohmann::json to_json() const;
  static CompletionRequest from_json(const nlohmann::json& j);
};

/// SHA-256 over the compact, key-sorted serialization of a request document.
/// Field order and JSON whitespace in the source document do not matter.
std::string fingerprint_json(const nlohmann::json& request_doc);
std::string fingerprint(const CompletionRequest& request);

/// Backend failure. `transient` failures are retried by the gateway.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, bool transient)
      : Error(ErrorCode::ProviderError, message), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Returns the completion text. Throws ProviderError or Error(Timeout).
  virtual std::string complete(const CompletionRequest& request) = 0;
};

/// Test double: ordered (matcher -> responder) rules, first match wins.
/// Unmatched requests raise a non-transient ProviderError.
class ScriptedBackend : public Backend {
 public:
  using Matcher = std::function<bool(const CompletionRequest&)>;
  using Responder = std::function<std::string(const CompletionRequest&)>;

  ScriptedBackend& on(Matcher match, Responder respond);
  /// Matches when the last message contains every needle.
  ScriptedBackend& on_contains(std::vector<std::string> needles, std::string response);
  ScriptedBackend& otherwise(Responder respond);

  /// Rule file: `{"rules": [{"contains": [..], "system_contains": [..],
  /// "response": ".."}], "default": ".."}`.
  static std::shared_ptr<ScriptedBackend> from_json(const nlohmann::json& doc);

  std::string complete(const CompletionRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  std::vector<CompletionRequest> history() const;

 private:
  struct Rule {
    Matcher match;
    Responder respond;
  };
  std::vector<Rule> rules_;
  std::optional<Responder> fallback_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex history_mutex_;
  std::vector<CompletionRequest> history_;
};

/// Refuses every call. Pairs with replay cassettes to prove a run touched no
/// live endpoint.
class OfflineBackend : public Backend {
 public:
  std::string complete(const CompletionRequest& request) override;
  std::size_t attempts() const { return attempts_.load(); }

 private:
  std::atomic<std::size_t> attempts_{0};
};

/// OpenAI-style `/chat/completions` client.
class OpenAiHttpBackend : public Backend {
 public:
  struct Options {
    std::string base_url;  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string api_key;
    /// "authorization" sends `Authorization: Bearer <key>`; "api-key" sends
    /// an `api-key` header (Azure style).
    std::string auth_style = "authorization";
    std::string model;
    double timeout_seconds = 60.0;
  };

  explicit OpenAiHttpBackend(Options options);
  std::string complete(const CompletionRequest& request) override;

  /// Request body sent for `request`; exposed for wire-format tests.
  nlohmann::json request_body(const CompletionRequest& request) const;

 private:
  Options options_;
};

enum class CassetteMode { Record, ReplayStrict, ReplayFallthrough };

std::string_view to_string(CassetteMode mode);
CassetteMode parse_cassette_mode(std::string_view text);

/// Ordered fingerprint -> response log, persisted as NDJSON
/// `{"fingerprint", "request", "response"}` lines.
class Cassette {
 public:
  explicit Cassette(CassetteMode mode, std::optional<std::filesystem::path> path = std::nullopt);

  /// Loads existing entries when the file exists. New entries recorded later
  /// are appended to the same file.
  static std::shared_ptr<Cassette> open(const std::filesystem::path& path, CassetteMode mode);

  CassetteMode mode() const { return mode_; }
  std::optional<std::string> lookup(const std::string& fingerprint) const;
  /// Returns false (and records nothing) when the fingerprint already exists.
  bool append(const std::string& fingerprint, const nlohmann::json& request,
              const std::string& response);
  std::size_t size() const;

 private:
  CassetteMode mode_;
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::string> responses_;
};

struct GatewayOptions {
  std::size_t max_in_flight = 4;
  /// Retries after the first attempt, for transient failures only.
  int max_retries = 3;
  std::vector<std::chrono::milliseconds> backoff = {std::chrono::milliseconds(1000),
                                                    std::chrono::milliseconds(2000),
                                                    std::chrono::milliseconds(4000)};
  /// Defaults to std::this_thread::sleep_for; tests inject a recorder.
  std::function<void(std::chrono::milliseconds)> sleeper;
};

struct SuiteResponse {
  std::size_t run_index = 0;
  std::size_t request_index = 0;
  std::optional<std::string> text;
  std::optional<ErrorCode> error_code;
  std::string error_message;

  bool ok() const { return text.has_value(); }
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<Cassette> cassette = nullptr,
                   GatewayOptions options = {});

  /// Cassette lookup first (record and replay modes), then the backend with
  /// retry. Throws CassetteMiss in replay_strict mode when nothing matches.
  std::string complete(const CompletionRequest& request);

  /// One pass over `requests` per schedule entry. Run r uses temperature
  /// schedule[r] and seed base_seed + r, so every run is replayable on its
  /// own. Failures are kept in place as error markers.
  std::vector<SuiteResponse> run_suite(const std::vector<CompletionRequest>& requests,
                                       const std::vector<double>& temperature_schedule);

  std::size_t backend_calls() const { return backend_calls_.load(); }
  std::size_t cassette_hits() const { return cassette_hits_.load(); }
  const GatewayOptions& options() const { return options_; }

 private:
  std::string call_backend(const CompletionRequest& request);

  std::shared_ptr<Backend> backend_;
  std::shared_ptr<Cassette> cassette_;
  GatewayOptions options_;

  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;

  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cassette_hits_{0};
};

/// The 5-run protocol: one deterministic pass then four at temperature 0.5.
std::vector<double> five_run_schedule();

}  // namespace sdoh
