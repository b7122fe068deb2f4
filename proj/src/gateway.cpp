// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/gateway.hpp"

#include <fstream>
#include <thread>

#include "sdoh/util.hpp"

namespace sdoh {

void CompletionRequest::validate() const {
  if (messages.empty()) throw Error(ErrorCode::InvalidArgument, "completion request has no messages");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must lie in [0, 2]");
  }
  if (max_tokens <= 0) throw Error(ErrorCode::InvalidArgument, "max_tokens must be positive");
}

nlohmann::json CompletionRequest::to_json() const {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"messages", msgs},
          {"temperature", temperature},
          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json()},
          {"max_tokens", max_tokens},
          {"model_tag", model_tag}};
}

CompletionRequest CompletionRequest::from_json(const nlohmann::json& j) {
  CompletionRequest req;
  for (const auto& m : j.at("messages")) {
    req.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  req.temperature = j.value("temperature", 0.0);
  if (j.contains("seed") && !j["seed"].is_null()) req.seed = j["seed"].get<std::int64_t>();
  req.max_tokens = j.value("max_tokens", 1024);
  req.model_tag = j.value("model_tag", std::string{});
  return req;
}

std::string fingerprint_json(const nlohmann::json& request_doc) {
  // nlohmann::json objects are key-sorted; dump() is compact.
  return sha256_hex(request_doc.dump());
}

std::string fingerprint(const CompletionRequest& request) {
  return fingerprint_json(request.to_json());
}

// ---------------------------------------------------------------------------

ScriptedBackend& ScriptedBackend::on(Matcher match, Responder respond) {
  rules_.push_back({std::move(match), std::move(respond)});
  return *this;
}

ScriptedBackend& ScriptedBackend::on_contains(std::vector<std::string> needles,
                                              std::string response) {
  return on(
      [needles = std::move(needles)](const CompletionRequest& req) {
        const auto& last = req.messages.back().content;
        for (const auto& n : needles) {
          if (last.find(n) == std::string::npos) return false;
        }
        return true;
      },
      [response = std::move(response)](const CompletionRequest&) { return response; });
}

ScriptedBackend& ScriptedBackend::otherwise(Responder respond) {
  fallback_ = std::move(respond);
  return *this;
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const nlohmann::json& doc) {
  auto backend = std::make_shared<ScriptedBackend>();
  for (const auto& rule : doc.value("rules", nlohmann::json::array())) {
    auto contains = rule.value("contains", std::vector<std::string>{});
    auto system_contains = rule.value("system_contains", std::vector<std::string>{});
    auto response = rule.at("response").get<std::string>();
    backend->on(
        [contains, system_contains](const CompletionRequest& req) {
          const auto& last = req.messages.back().content;
          for (const auto& n : contains) {
            if (last.find(n) == std::string::npos) return false;
          }
          const auto& first = req.messages.front().content;
          for (const auto& n : system_contains) {
            if (first.find(n) == std::string::npos) return false;
          }
          return true;
        },
        [response](const CompletionRequest&) { return response; });
  }
  if (doc.contains("default")) {
    backend->otherwise([text = doc["default"].get<std::string>()](const CompletionRequest&) {
      return text;
    });
  }
  return backend;
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
  ++calls_;
  {
    std::scoped_lock lock(history_mutex_);
    history_.push_back(request);
  }
  for (const auto& rule : rules_) {
    if (rule.match(request)) return rule.respond(request);
  }
  if (fallback_) return (*fallback_)(request);
  throw ProviderError("scripted backend: no rule matched the request", false);
}

std::vector<CompletionRequest> ScriptedBackend::history() const {
  std::scoped_lock lock(history_mutex_);
  return history_;
}

std::string OfflineBackend::complete(const CompletionRequest&) {
  ++attempts_;
  throw ProviderError("offline: live backend calls are disabled", false);
}

// ---------------------------------------------------------------------------

std::string_view to_string(CassetteMode mode) {
  switch (mode) {
    case CassetteMode::Record: return "record";
    case CassetteMode::ReplayStrict: return "replay_strict";
    case CassetteMode::ReplayFallthrough: return "replay_fallthrough";
  }
  return "";
}

CassetteMode parse_cassette_mode(std::string_view text) {
  if (text == "record") return CassetteMode::Record;
  if (text == "replay_strict") return CassetteMode::ReplayStrict;
  if (text == "replay_fallthrough") return CassetteMode::ReplayFallthrough;
  throw Error(ErrorCode::ConfigError, "unknown cassette mode '" + std::string(text) + "'");
}

Cassette::Cassette(CassetteMode mode, std::optional<std::filesystem::path> path)
    : mode_(mode), path_(std::move(path)) {}

std::shared_ptr<Cassette> Cassette::open(const std::filesystem::path& path, CassetteMode mode) {
  auto cassette = std::make_shared<Cassette>(mode, path);
  if (std::filesystem::exists(path)) {
    for (const auto& row : read_ndjson(path)) {
      const auto fp = row.at("fingerprint").get<std::string>();
      if (cassette->responses_.emplace(fp, row.at("response").get<std::string>()).second) {
        cassette->order_.push_back(fp);
      }
    }
  } else if (mode != CassetteMode::Record) {
    throw Error(ErrorCode::IoError, "cassette not found: " + path.string());
  }
  return cassette;
}

std::optional<std::string> Cassette::lookup(const std::string& fingerprint) const {
  std::scoped_lock lock(mutex_);
  auto it = responses_.find(fingerprint);
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

bool Cassette::append(const std::string& fingerprint, const nlohmann::json& request,
                      const std::string& response) {
  std::scoped_lock lock(mutex_);
  if (!responses_.emplace(fingerprint, response).second) return false;
  order_.push_back(fingerprint);
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to cassette " + path_->string());
    nlohmann::json row = {{"fingerprint", fingerprint}, {"request", request}, {"response", response}};
    out << row.dump() << '\n';
  }
  return true;
}

std::size_t Cassette::size() const {
  std::scoped_lock lock(mutex_);
  return order_.size();
}

// ---------------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<Cassette> cassette,
                 GatewayOptions options)
    : backend_(std::move(backend)), cassette_(std::move(cassette)), options_(std::move(options)) {
  if (!backend_) throw Error(ErrorCode::ConfigError, "gateway needs a backend");
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  if (!options_.sleeper) {
    options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string Gateway::complete(const CompletionRequest& request) {
  request.validate();
  if (!cassette_) return call_backend(request);

  const auto doc = request.to_json();
  const auto fp = fingerprint_json(doc);
  if (auto hit = cassette_->lookup(fp)) {
    ++cassette_hits_;
    return *hit;
  }
  switch (cassette_->mode()) {
    case CassetteMode::ReplayStrict:
      throw Error(ErrorCode::CassetteMiss, "no cassette entry for request " + fp.substr(0, 16));
    case CassetteMode::ReplayFallthrough:
      return call_backend(request);
    case CassetteMode::Record: {
      auto text = call_backend(request);
      cassette_->append(fp, doc, text);
      return text;
    }
  }
  return call_backend(request);
}

std::string Gateway::call_backend(const CompletionRequest& request) {
  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
  }
  struct SlotRelease {
    Gateway* self;
    ~SlotRelease() {
      {
        std::scoped_lock lock(self->slots_mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  for (int attempt = 0;; ++attempt) {
    ++backend_calls_;
    bool transient = false;
    try {
      return backend_->complete(request);
    } catch (const ProviderError& e) {
      if (!e.transient() || attempt >= options_.max_retries) throw;
      transient = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Timeout || attempt >= options_.max_retries) throw;
      transient = true;
    }
    if (transient && !options_.backoff.empty()) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(attempt),
                                             options_.backoff.size() - 1);
      options_.sleeper(options_.backoff[idx]);
    }
  }
}

std::vector<SuiteResponse> Gateway::run_suite(const std::vector<CompletionRequest>& requests,
                                              const std::vector<double>& temperature_schedule) {
  if (temperature_schedule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "run_suite needs at least one schedule entry");
  }
  const std::size_t per_run = requests.size();
  std::vector<SuiteResponse> out(per_run * temperature_schedule.size());
  parallel_for(out.size(), options_.max_in_flight, [&](std::size_t k) {
    const std::size_t run = k / per_run;
    const std::size_t idx = k % per_run;
    auto& slot = out[k];
    slot.run_index = run;
    slot.request_index = idx;
    CompletionRequest req = requests[idx];
    req.temperature = temperature_schedule[run];
    req.seed = req.seed.value_or(0) + static_cast<std::int64_t>(run);
    try {
      slot.text = complete(req);
    } catch (const Error& e) {
      slot.error_code = e.code();
      slot.error_message = e.what();
    }
  });
  return out;
}

std::vector<double> five_run_schedule() { return {0.0, 0.5, 0.5, 0.5, 0.5}; }

}  // namespace sdoh
