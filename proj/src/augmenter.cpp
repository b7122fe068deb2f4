// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/augmenter.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "sdoh/util.hpp"

namespace sdoh {

const std::string kAugmentPromptTemplate =
    "You are tasked with rewriting the raw notes to become related to some SDoH label.\n"
    "Here is the raw note: {raw_notes}\n"
    "And the specific label: {label}\n"
    "The definition of the label: {definition}\n"
    "Note:\n"
    "1. Do NOT include the definitions or examples provided in your rewrited content.\n"
    "2. Focus exclusively on the social history, disregarding sentences related to family history "
    "or other topics.\n"
    "3. The augmented notes should clearly reflect the label context, be contextually coherent, "
    "with varied and diverse expressions.\n"
    "4. The augmented note should be a detailed description of a specific patient case that "
    "illustrates the application of the SDoH label. Focus on the unique circumstances, events, and "
    "actions related to this individual case. Avoid using general or broad descriptions of "
    "processes or procedures; instead, provide concrete details and examples that are directly "
    "relevant to the patient's situation.\n"
    "5. Your output should not exceed 100 words.\n"
    "Augmented Notes:\n";

const std::string kOptimizePromptTemplate =
    "You maintain a prompt that rewrites clinical social-history notes so they reflect one SDoH "
    "label. Human reviewers rejected some of its outputs.\n\n"
    "Current prompt:\n<<<\n{current_prompt}\n>>>\n\n"
    "Rejected outputs and reviewer feedback:\n{failures}\n"
    "Revise the prompt so future outputs avoid these problems. Keep the placeholders {raw_notes}, "
    "{label} and {definition} exactly as written. Reply with the revised prompt only.";

namespace {

constexpr std::array<std::string_view, 3> kPlaceholders = {"{raw_notes}", "{label}", "{definition}"};

std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string_view, std::string_view>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    bool replaced = false;
    if (tmpl[pos] == '{') {
      for (const auto& [key, value] : values) {
        if (tmpl.compare(pos, key.size(), key) == 0) {
          out.append(value);
          pos += key.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(tmpl[pos++]);
  }
  return out;
}

std::string render_definition(const LabelDefinition& def) {
  std::string text = def.definition_text;
  if (!def.few_shot_snippets.empty()) {
    text += "\nFew-Shot Examples:";
    for (const auto& s : def.few_shot_snippets) text += "\n- \"" + s + "\"";
  }
  return text;
}

std::string strip_fences(std::string_view text) {
  auto t = trim(text);
  if (t.starts_with("```")) {
    const auto nl = t.find('\n');
    t = nl == std::string_view::npos ? std::string_view{} : t.substr(nl + 1);
    if (const auto close = t.rfind("```"); close != std::string_view::npos) t = t.substr(0, close);
  }
  return std::string(trim(t));
}

std::string padded(std::size_t n) {
  std::string s = std::to_string(n);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

}  // namespace

bool has_augment_placeholders(std::string_view prompt_template) {
  return std::all_of(kPlaceholders.begin(), kPlaceholders.end(), [&](std::string_view p) {
    return prompt_template.find(p) != std::string_view::npos;
  });
}

std::string render_augment_prompt(std::string_view raw_note, SdohLabel label,
                                  const LabelDefinition& definition,
                                  std::string_view prompt_template) {
  if (trim(raw_note).empty()) throw Error(ErrorCode::EmptyRawNote, "raw note is empty");
  if (!has_augment_placeholders(prompt_template)) {
    throw Error(ErrorCode::InvalidArgument, "augmentation prompt is missing a placeholder");
  }
  const auto def_text = render_definition(definition);
  return substitute(prompt_template, {{"{raw_notes}", raw_note},
                                      {"{label}", canonical_name(label)},
                                      {"{definition}", def_text}});
}

// ---------------------------------------------------------------------------

const BatchItem& AugmentationBatch::item(const std::string& item_id) const {
  for (const auto& it : items) {
    if (it.item_id == item_id) return it;
  }
  throw Error(ErrorCode::UnknownItem, "no item '" + item_id + "' in batch " + batch_id);
}

void AugmentationBatch::record_verdict(const std::string& item_id, bool passed,
                                       std::optional<std::string> feedback) {
  auto it = std::find_if(items.begin(), items.end(),
                         [&](const BatchItem& b) { return b.item_id == item_id; });
  if (it == items.end()) {
    throw Error(ErrorCode::UnknownItem, "no item '" + item_id + "' in batch " + batch_id);
  }
  if (it->failed) {
    throw Error(ErrorCode::InvalidState, "item '" + item_id + "' failed generation");
  }
  if (it->verdict) throw Error(ErrorCode::AlreadyVerdicted, "item '" + item_id + "' already has a verdict");
  if (feedback && trim(*feedback).empty()) feedback.reset();
  if (!passed && !feedback) {
    throw Error(ErrorCode::MissingFeedback, "a False verdict needs feedback");
  }
  it->verdict = Verdict{passed, std::move(feedback)};
}

std::size_t AugmentationBatch::verdicted() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const BatchItem& b) { return b.verdict.has_value(); }));
}

std::size_t AugmentationBatch::passed() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const BatchItem& b) {
    return b.verdict && b.verdict->passed;
  }));
}

std::size_t AugmentationBatch::failed() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const BatchItem& b) { return b.failed; }));
}

bool AugmentationBatch::complete() const { return verdicted() + failed() == items.size(); }

std::vector<nlohmann::json> AugmentationBatch::to_rows() const {
  std::vector<nlohmann::json> rows;
  for (const auto& it : items) {
    nlohmann::json verdict;
    if (it.verdict) {
      verdict = {{"passed", it.verdict->passed},
                 {"feedback", it.verdict->feedback ? nlohmann::json(*it.verdict->feedback) : nlohmann::json()}};
    }
    rows.push_back({{"batch_id", batch_id},
                    {"label", canonical_name(label)},
                    {"round_index", round_index},
                    {"item_id", it.item_id},
                    {"source_raw_note_id", it.source_raw_note_id},
                    {"generated_text", it.generated_text},
                    {"failed", it.failed},
                    {"error", it.error},
                    {"verdict", verdict}});
  }
  return rows;
}

AugmentationBatch AugmentationBatch::from_rows(const std::vector<nlohmann::json>& rows) {
  AugmentationBatch b;
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "batch file is empty");
  b.batch_id = rows.front().at("batch_id").get<std::string>();
  b.label = parse_label(rows.front().at("label").get<std::string>());
  b.round_index = rows.front().value("round_index", std::size_t{0});
  for (const auto& row : rows) {
    BatchItem it;
    it.item_id = row.at("item_id").get<std::string>();
    it.source_raw_note_id = row.at("source_raw_note_id").get<std::string>();
    it.generated_text = row.value("generated_text", std::string{});
    it.failed = row.value("failed", false);
    it.error = row.value("error", std::string{});
    if (row.contains("verdict") && row["verdict"].is_object()) {
      const auto& v = row["verdict"];
      Verdict verdict{v.at("passed").get<bool>(), std::nullopt};
      if (v.contains("feedback") && v["feedback"].is_string()) verdict.feedback = v["feedback"].get<std::string>();
      it.verdict = verdict;
    }
    b.items.push_back(std::move(it));
  }
  return b;
}

void AugmentationBatch::save(const std::filesystem::path& path) const { write_ndjson(path, to_rows()); }

AugmentationBatch AugmentationBatch::load(const std::filesystem::path& path) {
  return from_rows(read_ndjson(path));
}

double batch_accuracy(const AugmentationBatch& batch) {
  if (!batch.complete()) {
    throw Error(ErrorCode::IncompleteVerdicts,
                std::to_string(batch.items.size() - batch.failed() - batch.verdicted()) +
                    " item(s) in " + batch.batch_id + " still need a verdict");
  }
  const auto verdicted = batch.verdicted();
  if (verdicted == 0) return 0.0;
  return static_cast<double>(batch.passed()) / static_cast<double>(verdicted);
}

nlohmann::json AugmenterState::to_json() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& r : history) {
    nlohmann::json fb = nlohmann::json::array();
    for (const auto& f : r.feedback) {
      fb.push_back({{"item_id", f.item_id}, {"generated_text", f.generated_text}, {"feedback", f.feedback}});
    }
    hist.push_back({{"batch_id", r.batch_id},
                    {"accuracy", r.accuracy},
                    {"accepted_ids", r.accepted_ids},
                    {"feedback", fb}});
  }
  return {{"label", canonical_name(label)},
          {"current_prompt", current_prompt},
          {"round_index", round_index},
          {"history", hist}};
}

AugmentationBatch generate_batch(const AugmenterState& state, const std::vector<RawNote>& raw_notes,
                                 Gateway& gateway, const Taxonomy& taxonomy,
                                 const AugmenterConfig& config) {
  if (raw_notes.empty()) throw Error(ErrorCode::InvalidArgument, "no raw notes to augment");
  const auto& definition = taxonomy.definition_of(state.label);

  AugmentationBatch batch;
  batch.label = state.label;
  batch.round_index = state.round_index;
  batch.batch_id = std::string(canonical_name(state.label)) + "-r" + std::to_string(state.round_index);
  batch.items.resize(raw_notes.size());

  parallel_for(raw_notes.size(), gateway.options().max_in_flight, [&](std::size_t i) {
    auto& item = batch.items[i];
    item.item_id = batch.batch_id + "-" + padded(i);
    item.source_raw_note_id = raw_notes[i].id;
    try {
      CompletionRequest req;
      req.messages = {{"user", render_augment_prompt(raw_notes[i].augmentation_input(), state.label,
                                                     definition, state.current_prompt)}};
      req.temperature = config.temperature;
      req.seed = static_cast<std::int64_t>(i);
      req.model_tag = config.model_tag;
      item.generated_text = std::string(trim(gateway.complete(req)));
      if (item.generated_text.empty()) {
        item.failed = true;
        item.error = "empty generation";
      }
    } catch (const Error& e) {
      item.failed = true;
      item.error = e.what();
    }
  });
  return batch;
}

std::string optimize_prompt(std::string_view current_prompt,
                            const std::vector<FeedbackItem>& feedback, Gateway& gateway,
                            const AugmenterConfig& config) {
  if (feedback.empty()) {
    throw Error(ErrorCode::InvalidArgument, "prompt revision needs at least one feedback item");
  }
  std::ostringstream failures;
  for (std::size_t i = 0; i < feedback.size(); ++i) {
    failures << i + 1 << ". Output: " << feedback[i].generated_text << "\n   Feedback: "
             << feedback[i].feedback << "\n";
  }
  const auto failures_text = failures.str();
  CompletionRequest req;
  req.messages = {{"user", substitute(config.optimize_template, {{"{current_prompt}", current_prompt},
                                                                  {"{failures}", failures_text}})}};
  req.temperature = 0.0;
  req.model_tag = config.model_tag;
  for (int attempt = 0; attempt < 2; ++attempt) {
    req.seed = attempt;
    auto revised = strip_fences(gateway.complete(req));
    if (has_augment_placeholders(revised)) return revised;
  }
  throw Error(ErrorCode::InvalidRevision, "revised prompt lost a required placeholder");
}

// ---------------------------------------------------------------------------

AugmentationSession::AugmentationSession(SdohLabel label, NotePool& pool, Gateway& gateway,
                                         const Taxonomy& taxonomy, AugmenterConfig config,
                                         std::optional<std::string> initial_prompt)
    : pool_(pool), gateway_(gateway), taxonomy_(taxonomy), config_(std::move(config)) {
  if (label == SdohLabel::Other) throw Error(ErrorCode::InvalidLabel, "cannot augment toward 'Other'");
  if (config_.max_rounds == 0 || config_.batch_size == 0) {
    throw Error(ErrorCode::ConfigError, "max_rounds and batch_size must be positive");
  }
  state_.label = label;
  if (initial_prompt) {
    if (!has_augment_placeholders(*initial_prompt)) {
      throw Error(ErrorCode::ConfigError, "initial augmentation prompt is missing a placeholder");
    }
    state_.current_prompt = *initial_prompt;
  }
  taxonomy_.definition_of(label);
}

const AugmentationBatch& AugmentationSession::start() {
  if (batch_) throw Error(ErrorCode::InvalidState, "session already started");
  generate_round();
  return *batch_;
}

void AugmentationSession::generate_round() {
  auto notes = pool_.draw(config_.batch_size);
  batch_ = generate_batch(state_, notes, gateway_, taxonomy_, config_);
}

const AugmentationBatch& AugmentationSession::batch() const {
  if (!batch_) throw Error(ErrorCode::InvalidState, "no active batch");
  return *batch_;
}

void AugmentationSession::record_verdict(const std::string& item_id, bool passed,
                                         std::optional<std::string> feedback) {
  if (!batch_) throw Error(ErrorCode::InvalidState, "no active batch");
  if (status_ != SessionStatus::Running) {
    throw Error(ErrorCode::InvalidState, "session has finished");
  }
  batch_->record_verdict(item_id, passed, std::move(feedback));
}

AdvanceResult AugmentationSession::advance() {
  if (!batch_) throw Error(ErrorCode::InvalidState, "no active batch");
  if (status_ != SessionStatus::Running) throw Error(ErrorCode::InvalidState, "session has finished");

  AdvanceResult result;
  result.accuracy = batch_accuracy(*batch_);

  RoundOutcome outcome;
  outcome.batch_id = batch_->batch_id;
  outcome.accuracy = result.accuracy;
  for (const auto& item : batch_->items) {
    if (item.verdict && item.verdict->passed) {
      outcome.accepted_ids.push_back(item.item_id);
      accepted_.push_back({item.item_id, item.source_raw_note_id, item.generated_text, state_.label,
                           batch_->round_index});
    } else {
      if (item.verdict) {
        outcome.feedback.push_back({item.item_id, item.generated_text, *item.verdict->feedback});
      }
      pool_.return_note(item.source_raw_note_id);
    }
  }
  state_.history.push_back(outcome);
  ++state_.round_index;

  if (result.accuracy >= config_.threshold) {
    result.accepted_round = true;
    status_ = SessionStatus::Succeeded;
  } else if (state_.round_index >= config_.max_rounds) {
    status_ = SessionStatus::ThresholdNotReached;
  } else {
    if (outcome.feedback.empty()) {
      // Every item failed generation; nothing to revise against.
      throw Error(ErrorCode::InvalidState, "round scored below threshold without any feedback");
    }
    state_.current_prompt = optimize_prompt(state_.current_prompt, outcome.feedback, gateway_, config_);
    ++optimize_calls_;
    result.optimized = true;
    generate_round();
    result.next_batch_id = batch_->batch_id;
  }
  result.status = status_;
  return result;
}

ThresholdNotReachedError::ThresholdNotReachedError(AugmentationResult result)
    : Error(ErrorCode::ThresholdNotReached,
            "accuracy threshold not reached after " + std::to_string(result.state.round_index) +
                " round(s)"),
      result_(std::move(result)) {}

AugmentationResult run_until_threshold(SdohLabel label, NotePool& pool, Gateway& gateway,
                                       const Taxonomy& taxonomy, const VerdictSource& verdicts,
                                       const AugmenterConfig& config,
                                       std::optional<std::string> initial_prompt) {
  AugmentationSession session(label, pool, gateway, taxonomy, config, std::move(initial_prompt));
  session.start();
  while (true) {
    verdicts(session);
    const auto step = session.advance();
    if (step.status == SessionStatus::Running) continue;
    AugmentationResult result{session.state(), session.accepted(), session.optimize_calls()};
    if (step.status == SessionStatus::ThresholdNotReached) throw ThresholdNotReachedError(std::move(result));
    return result;
  }
}

}  // namespace sdoh
