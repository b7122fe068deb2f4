// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sdoh/gateway.hpp"
#include "sdoh/ingest.hpp"
#include "sdoh/program.hpp"

namespace sdoh::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "sdoh") {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline GatewayOptions fast_options(std::size_t max_in_flight = 4) {
  GatewayOptions o;
  o.max_in_flight = max_in_flight;
  o.backoff = {std::chrono::milliseconds(0)};
  o.sleeper = [](std::chrono::milliseconds) {};
  return o;
}

inline Gateway scripted_gateway(std::shared_ptr<Backend> backend, std::shared_ptr<Cassette> cassette = nullptr) {
  return Gateway(std::move(backend), std::move(cassette), fast_options());
}

/// Text of the last message of a request.
inline const std::string& last_content(const CompletionRequest& req) { return req.messages.back().content; }

/// Which annotation step an annotator request targets, read from the
/// label list in its system message.
inline std::optional<Step> step_of(const CompletionRequest& req) {
  const auto& sys = req.messages.front().content;
  if (sys.find("exactly one of: Yes, No") != std::string::npos) return Step::Binary;
  if (sys.find("exactly one of: t3_Eviction_absent") != std::string::npos) return Step::Eviction;
  if (sys.find("exactly one of: t1_Homelessness") != std::string::npos) return Step::NonEviction;
  return std::nullopt;
}

/// The note an annotator request asks about (last user turn, minus prefix).
inline std::string note_of(const CompletionRequest& req) {
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
    if (it->role == "user" && it->content.rfind("Note: ", 0) == 0) return it->content.substr(6);
  }
  return {};
}

/// Raw note embedded in a default-template augmentation prompt.
inline std::string raw_note_of(const CompletionRequest& req) {
  const auto& c = last_content(req);
  const std::string open = "Here is the raw note: ", close = "\nAnd the specific label";
  const auto a = c.find(open);
  if (a == std::string::npos) return {};
  const auto b = c.find(close, a);
  return c.substr(a + open.size(), b - a - open.size());
}

/// Backend for augmentation: rewrites echo the raw note, prompt revisions
/// return a numbered prompt that keeps every placeholder.
inline std::shared_ptr<ScriptedBackend> augment_backend() {
  auto backend = std::make_shared<ScriptedBackend>();
  auto revisions = std::make_shared<std::atomic<int>>(0);
  backend->otherwise([revisions](const CompletionRequest& req) -> std::string {
    if (last_content(req).find("Current prompt:") != std::string::npos) {
      return "Revision " + std::to_string(++*revisions) +
             ". Here is the raw note: {raw_notes}\nAnd the specific label: {label}\n"
             "The definition of the label: {definition}\nAugmented Notes:\n";
    }
    return "Rewritten: " + raw_note_of(req);
  });
  return backend;
}

inline std::vector<RawNote> make_notes(std::size_t n, const std::string& prefix = "n") {
  std::vector<RawNote> notes;
  for (std::size_t i = 0; i < n; ++i) {
    RawNote note;
    note.id = prefix + std::to_string(i);
    note.full_text = "Social History: patient " + std::to_string(i) + " lives alone in an apartment.";
    note.social_history = "patient " + std::to_string(i) + " lives alone in an apartment.";
    note.source = NoteSource::MimicLike;
    notes.push_back(std::move(note));
  }
  return notes;
}

}  // namespace sdoh::testing
