// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/review.hpp"

#include <httplib.h>

#include <utility>

#include "sdoh/util.hpp"

namespace sdoh {

nlohmann::json ReviewItemView::to_json() const {
  return {{"item_id", item_id},
          {"batch_id", batch_id},
          {"label", label},
          {"generated_text", generated_text},
          {"definition_text", definition_text},
          {"status", status}};
}

nlohmann::json ProgressView::to_json() const {
  return {{"batch_id", batch_id},
          {"verdicted", verdicted},
          {"total", total},
          {"running_accuracy", running_accuracy},
          {"threshold", threshold},
          {"round_index", round_index},
          {"max_rounds", max_rounds},
          {"session_status", session_status}};
}

namespace {

std::string_view status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running:
      return "running";
    case SessionStatus::Succeeded:
      return "succeeded";
    case SessionStatus::ThresholdNotReached:
      return "threshold_not_reached";
  }
  return "running";
}

std::string batch_of_item(const std::string& item_id) {
  const auto dash = item_id.rfind('-');
  if (dash == std::string::npos || dash == 0) {
    throw Error(ErrorCode::UnknownItem, "no item '" + item_id + "'");
  }
  return item_id.substr(0, dash);
}

}  // namespace

struct ReviewService::Entry {
  std::unique_ptr<AugmentationSession> session;
  mutable std::mutex mutex;
  std::map<std::string, AugmentationBatch> closed;  // past batches by id
  std::map<std::pair<std::string, std::string>, nlohmann::json> submissions;
  std::map<std::string, nlohmann::json> advances;
  std::size_t transitions = 0;

  const AugmentationBatch& batch(const std::string& batch_id) const {
    if (session->has_batch() && session->batch().batch_id == batch_id) return session->batch();
    auto it = closed.find(batch_id);
    if (it == closed.end()) throw Error(ErrorCode::UnknownItem, "no batch '" + batch_id + "'");
    return it->second;
  }
};

ReviewService::ReviewService(const Taxonomy& taxonomy, std::optional<std::filesystem::path> persist_dir)
    : taxonomy_(taxonomy), persist_dir_(std::move(persist_dir)) {}

ReviewService::~ReviewService() = default;

std::string ReviewService::add_session(std::unique_ptr<AugmentationSession> session) {
  if (!session || !session->has_batch()) {
    throw Error(ErrorCode::InvalidState, "review sessions must be started before registration");
  }
  auto entry = std::make_unique<Entry>();
  entry->session = std::move(session);
  const auto batch_id = entry->session->batch().batch_id;
  std::unique_lock lock(index_mutex_);
  if (by_batch_.count(batch_id)) {
    throw Error(ErrorCode::InvalidState, "batch '" + batch_id + "' is already registered");
  }
  by_batch_[batch_id] = entry.get();
  {
    std::lock_guard entry_lock(entry->mutex);
    persist_locked(*entry);
  }
  entries_.push_back(std::move(entry));
  return batch_id;
}

ReviewService::Entry& ReviewService::entry_for_batch(const std::string& batch_id) const {
  std::shared_lock lock(index_mutex_);
  auto it = by_batch_.find(batch_id);
  if (it == by_batch_.end()) throw Error(ErrorCode::UnknownItem, "no batch '" + batch_id + "'");
  return *it->second;
}

ReviewService::Entry& ReviewService::entry_for_item(const std::string& item_id) const {
  return entry_for_batch(batch_of_item(item_id));
}

std::vector<ReviewItemView> ReviewService::list_items(const std::string& batch_id) const {
  auto& entry = entry_for_batch(batch_id);
  std::lock_guard lock(entry.mutex);
  const auto& batch = entry.batch(batch_id);
  const auto& definition = taxonomy_.definition_of(batch.label).definition_text;
  std::vector<ReviewItemView> out;
  for (const auto& item : batch.items) {
    if (item.failed) continue;
    out.push_back({item.item_id, batch.batch_id, std::string(canonical_name(batch.label)),
                   item.generated_text, definition, item.verdict ? "verdicted" : "pending"});
  }
  return out;
}

std::vector<ReviewItemView> ReviewService::list_pending(const std::string& batch_id) const {
  auto items = list_items(batch_id);
  std::erase_if(items, [](const ReviewItemView& v) { return v.status != "pending"; });
  return items;
}

nlohmann::json ReviewService::submit_verdict(const std::string& item_id, bool passed,
                                             std::optional<std::string> feedback,
                                             std::optional<std::string> idempotency_key) {
  auto& entry = entry_for_item(item_id);
  std::lock_guard lock(entry.mutex);
  if (idempotency_key) {
    auto it = entry.submissions.find({item_id, *idempotency_key});
    if (it != entry.submissions.end()) return it->second;
  }
  const auto batch_id = batch_of_item(item_id);
  const auto& batch = entry.batch(batch_id);
  if (!entry.session->has_batch() || &batch != &entry.session->batch()) {
    const auto& item = batch.item(item_id);
    if (item.verdict) throw Error(ErrorCode::AlreadyVerdicted, "item '" + item_id + "' already has a verdict");
    throw Error(ErrorCode::InvalidState, "batch '" + batch_id + "' is closed");
  }
  entry.session->record_verdict(item_id, passed, std::move(feedback));
  const auto& item = entry.session->batch().item(item_id);
  nlohmann::json response = {{"item_id", item_id},
                             {"batch_id", batch_id},
                             {"status", "verdicted"},
                             {"passed", item.verdict->passed}};
  if (idempotency_key) entry.submissions[{item_id, *idempotency_key}] = response;
  persist_locked(entry);
  return response;
}

ProgressView ReviewService::progress(const std::string& batch_id) const {
  auto& entry = entry_for_batch(batch_id);
  std::lock_guard lock(entry.mutex);
  const auto& batch = entry.batch(batch_id);
  ProgressView view;
  view.batch_id = batch_id;
  view.verdicted = batch.verdicted();
  view.total = batch.items.size() - batch.failed();
  view.running_accuracy =
      view.verdicted == 0 ? 0.0 : static_cast<double>(batch.passed()) / static_cast<double>(view.verdicted);
  view.threshold = entry.session->config().threshold;
  view.round_index = batch.round_index;
  view.max_rounds = entry.session->config().max_rounds;
  view.session_status = std::string(status_name(entry.session->status()));
  return view;
}

nlohmann::json ReviewService::advance_round(const std::string& batch_id) {
  auto& entry = entry_for_batch(batch_id);
  std::lock_guard lock(entry.mutex);
  if (auto it = entry.advances.find(batch_id); it != entry.advances.end()) return it->second;
  if (!entry.session->has_batch() || entry.session->batch().batch_id != batch_id) {
    throw Error(ErrorCode::InvalidState, "batch '" + batch_id + "' is not the active batch");
  }
  auto snapshot = entry.session->batch();
  const auto result = entry.session->advance();
  ++entry.transitions;
  entry.closed.emplace(batch_id, std::move(snapshot));

  nlohmann::json response = {{"batch_id", batch_id},
                             {"accuracy", result.accuracy},
                             {"accepted_round", result.accepted_round},
                             {"optimized", result.optimized},
                             {"status", status_name(result.status)},
                             {"next_batch_id", result.next_batch_id ? nlohmann::json(*result.next_batch_id)
                                                                    : nlohmann::json()}};
  entry.advances[batch_id] = response;
  if (result.next_batch_id) {
    std::unique_lock index_lock(index_mutex_);
    by_batch_[*result.next_batch_id] = &entry;
  }
  persist_locked(entry);
  return response;
}

const AugmentationSession& ReviewService::session_for(const std::string& batch_id) const {
  return *entry_for_batch(batch_id).session;
}

nlohmann::json ReviewService::list_batches() const {
  std::shared_lock lock(index_mutex_);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [batch_id, entry] : by_batch_) {
    std::lock_guard entry_lock(entry->mutex);
    const auto& batch = entry->batch(batch_id);
    rows.push_back({{"batch_id", batch_id},
                    {"label", canonical_name(batch.label)},
                    {"round_index", batch.round_index},
                    {"current", entry->session->has_batch() && entry->session->batch().batch_id == batch_id &&
                                    entry->session->status() == SessionStatus::Running}});
  }
  return rows;
}

std::size_t ReviewService::state_transitions() const {
  std::shared_lock lock(index_mutex_);
  std::size_t n = 0;
  for (const auto& e : entries_) {
    std::lock_guard entry_lock(e->mutex);
    n += e->transitions;
  }
  return n;
}

void ReviewService::persist_locked(const Entry& entry) const {
  if (!persist_dir_) return;
  const auto& session = *entry.session;
  const std::string label(canonical_name(session.state().label));
  if (session.has_batch()) session.batch().save(*persist_dir_ / (session.batch().batch_id + ".ndjson"));
  write_text_file(*persist_dir_ / (label + ".state.json"), session.state().to_json().dump(2) + "\n");
  std::vector<nlohmann::json> accepted;
  for (const auto& a : session.accepted()) {
    accepted.push_back({{"item_id", a.item_id},
                        {"source_raw_note_id", a.source_raw_note_id},
                        {"text", a.text},
                        {"label", canonical_name(a.label)},
                        {"round_index", a.round_index}});
  }
  write_ndjson(*persist_dir_ / (label + ".accepted.ndjson"), accepted);
}

// ---------------------------------------------------------------------------

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownItem:
      return 404;
    case ErrorCode::AlreadyVerdicted:
    case ErrorCode::IncompleteVerdicts:
    case ErrorCode::InvalidState:
      return 409;
    case ErrorCode::MissingFeedback:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidLabel:
      return 400;
    default:
      return 500;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, fn(req));
    } catch (const Error& e) {
      send_json(res, http_status_for(e.code()),
                {{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}});
    } catch (const nlohmann::json::exception& e) {
      send_json(res, 400, {{"error", {{"code", "InvalidArgument"}, {"message", e.what()}}}});
    }
  };
}

std::string required_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name)) throw Error(ErrorCode::InvalidArgument, "missing query parameter '" + name + "'");
  return req.get_param_value(name);
}

nlohmann::json views_to_json(const std::string& batch_id, const std::vector<ReviewItemView>& views) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& v : views) items.push_back(v.to_json());
  return {{"batch_id", batch_id}, {"items", items}};
}

std::optional<std::string> optional_string(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  return body[key].get<std::string>();
}

}  // namespace

ReviewHttpServer::ReviewHttpServer(ReviewService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& svc = service_;
  server_->Get("/api/batches", guarded([&svc](const httplib::Request&) { return svc.list_batches(); }));
  server_->Get("/api/list_pending", guarded([&svc](const httplib::Request& req) {
                 const auto id = required_param(req, "batch_id");
                 return views_to_json(id, svc.list_pending(id));
               }));
  server_->Get("/api/items", guarded([&svc](const httplib::Request& req) {
                 const auto id = required_param(req, "batch_id");
                 return views_to_json(id, svc.list_items(id));
               }));
  server_->Get("/api/progress", guarded([&svc](const httplib::Request& req) {
                 return svc.progress(required_param(req, "batch_id")).to_json();
               }));
  server_->Post("/api/submit_verdict", guarded([&svc](const httplib::Request& req) {
                  const auto body = nlohmann::json::parse(req.body);
                  return svc.submit_verdict(body.at("item_id").get<std::string>(),
                                            body.at("passed").get<bool>(), optional_string(body, "feedback"),
                                            optional_string(body, "idempotency_key"));
                }));
  server_->Post("/api/advance_round", guarded([&svc](const httplib::Request& req) {
                  const auto body = nlohmann::json::parse(req.body);
                  return svc.advance_round(body.at("batch_id").get<std::string>());
                }));
}

ReviewHttpServer::~ReviewHttpServer() { stop(); }

int ReviewHttpServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else if (server_->bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw Error(ErrorCode::IoError, "cannot bind review server on " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ReviewHttpServer::listen(const std::string& host, int port) {
  port_ = port;
  if (!server_->listen(host, port)) throw Error(ErrorCode::IoError, "cannot listen on port " + std::to_string(port));
}

void ReviewHttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace sdoh
