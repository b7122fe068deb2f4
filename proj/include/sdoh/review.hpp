// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sdoh/augmenter.hpp"

namespace httplib {
class Server;
}

namespace sdoh {

struct ReviewItemView {
  std::string item_id;
  std::string batch_id;
  std::string label;
  std::string generated_text;
  std::string definition_text;
  std::string status;  // "pending" | "verdicted"

  nlohmann::json to_json() const;
};

struct ProgressView {
  std::string batch_id;
  std::size_t verdicted = 0;
  std::size_t total = 0;  // items eligible for review (generation succeeded)
  double running_accuracy = 0.0;
  double threshold = 0.0;
  std::size_t round_index = 0;
  std::size_t max_rounds = 0;
  std::string session_status;

  nlohmann::json to_json() const;
};

/// Review-side owner of augmentation sessions. Each session is guarded by
/// its own mutex, so verdicts and round advances for one batch are
/// serialized while other sessions proceed.
class ReviewService {
 public:
  explicit ReviewService(const Taxonomy& taxonomy,
                         std::optional<std::filesystem::path> persist_dir = std::nullopt);
  ~ReviewService();
  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  /// Takes ownership of a started session; returns its current batch id.
  std::string add_session(std::unique_ptr<AugmentationSession> session);

  std::vector<ReviewItemView> list_items(const std::string& batch_id) const;
  std::vector<ReviewItemView> list_pending(const std::string& batch_id) const;

  /// Idempotent per (item_id, idempotency_key): a repeated key replays the
  /// first response without touching state.
  nlohmann::json submit_verdict(const std::string& item_id, bool passed,
                                std::optional<std::string> feedback,
                                std::optional<std::string> idempotency_key = std::nullopt);

  ProgressView progress(const std::string& batch_id) const;

  /// Runs at most once per batch; duplicates get the cached result.
  nlohmann::json advance_round(const std::string& batch_id);

  /// Session owning `batch_id` (current or past batch). Throws UnknownItem.
  const AugmentationSession& session_for(const std::string& batch_id) const;

  /// One row per known batch: batch_id, label, round_index, current.
  nlohmann::json list_batches() const;

  std::size_t state_transitions() const;

 private:
  struct Entry;
  Entry& entry_for_batch(const std::string& batch_id) const;
  Entry& entry_for_item(const std::string& item_id) const;
  void persist_locked(const Entry& entry) const;

  const Taxonomy& taxonomy_;
  std::optional<std::filesystem::path> persist_dir_;
  mutable std::shared_mutex index_mutex_;
  std::vector<std::unique_ptr<Entry>> entries_;
  std::map<std::string, Entry*> by_batch_;
};

/// HTTP status for an error code raised by the review API.
int http_status_for(ErrorCode code);

/// JSON-over-HTTP front end for a ReviewService.
///   GET  /api/list_pending?batch_id=...   -> {batch_id, items: [...]}
///   GET  /api/items?batch_id=...          -> {batch_id, items: [...]}
///   POST /api/submit_verdict  {item_id, passed, feedback?, idempotency_key?}
///   GET  /api/progress?batch_id=...
///   POST /api/advance_round   {batch_id}
///   GET  /api/batches
class ReviewHttpServer {
 public:
  explicit ReviewHttpServer(ReviewService& service);
  ~ReviewHttpServer();
  ReviewHttpServer(const ReviewHttpServer&) = delete;
  ReviewHttpServer& operator=(const ReviewHttpServer&) = delete;

  /// Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  ReviewService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace sdoh
