// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdoh/error.hpp"
#include "sdoh/gateway.hpp"
#include "sdoh/ingest.hpp"
#include "sdoh/taxonomy.hpp"

namespace sdoh {

/// Rewrite prompt with `{raw_notes}`, `{label}` and `{definition}`
/// placeholders.
extern const std::string kAugmentPromptTemplate;
/// Prompt-revision meta-prompt with `{current_prompt}` and `{failures}`.
extern const std::string kOptimizePromptTemplate;

/// True when all three augmentation placeholders occur in `prompt_template`.
bool has_augment_placeholders(std::string_view prompt_template);

/// Substitutes the placeholders in one pass, so placeholder-like text inside
/// the note or definition is left alone. The definition renders as the
/// definition text followed by its few-shot snippets. Throws EmptyRawNote.
std::string render_augment_prompt(std::string_view raw_note, SdohLabel label,
                                  const LabelDefinition& definition,
                                  std::string_view prompt_template = kAugmentPromptTemplate);

struct Verdict {
  bool passed = false;
  std::optional<std::string> feedback;
};

struct BatchItem {
  std::string item_id;
  std::string source_raw_note_id;
  std::string generated_text;
  std::optional<Verdict> verdict;
  bool failed = false;  // generation failed; excluded from accuracy
  std::string error;
};

struct AugmentationBatch {
  std::string batch_id;
  SdohLabel label = SdohLabel::EvictionAbsent;
  std::size_t round_index = 0;
  std::vector<BatchItem> items;

  const BatchItem& item(const std::string& item_id) const;

  /// Throws UnknownItem, AlreadyVerdicted, MissingFeedback (false verdict
  /// without feedback) or InvalidState (item whose generation failed).
  void record_verdict(const std::string& item_id, bool passed,
                      std::optional<std::string> feedback = std::nullopt);

  std::size_t verdicted() const;
  std::size_t passed() const;
  std::size_t failed() const;
  bool complete() const;

  std::vector<nlohmann::json> to_rows() const;
  static AugmentationBatch from_rows(const std::vector<nlohmann::json>& rows);
  void save(const std::filesystem::path& path) const;
  static AugmentationBatch load(const std::filesystem::path& path);
};

/// passed / verdicted over non-failed items. Throws IncompleteVerdicts while
/// any non-failed item lacks a verdict.
double batch_accuracy(const AugmentationBatch& batch);

struct FeedbackItem {
  std::string item_id;
  std::string generated_text;
  std::string feedback;
};

struct RoundOutcome {
  std::string batch_id;
  double accuracy = 0.0;
  std::vector<std::string> accepted_ids;
  std::vector<FeedbackItem> feedback;
};

struct AugmenterState {
  SdohLabel label = SdohLabel::EvictionAbsent;
  std::string current_prompt = kAugmentPromptTemplate;
  std::size_t round_index = 0;
  std::vector<RoundOutcome> history;

  nlohmann::json to_json() const;
};

struct AugmenterConfig {
  double threshold = 0.90;
  std::size_t max_rounds = 3;
  std::size_t batch_size = 20;
  double temperature = 0.7;
  std::string model_tag;
  std::string optimize_template = kOptimizePromptTemplate;
};

/// One generation per raw note. Items whose gateway call fails are marked
/// failed and carry the error text.
AugmentationBatch generate_batch(const AugmenterState& state, const std::vector<RawNote>& raw_notes,
                                 Gateway& gateway, const Taxonomy& taxonomy,
                                 const AugmenterConfig& config = {});

/// Asks the model to revise `current_prompt` given rejected generations and
/// their feedback. The revision must keep all three placeholders; one retry,
/// then Error(InvalidRevision). Throws InvalidArgument without feedback.
std::string optimize_prompt(std::string_view current_prompt,
                            const std::vector<FeedbackItem>& feedback, Gateway& gateway,
                            const AugmenterConfig& config = {});

struct AcceptedNote {
  std::string item_id;
  std::string source_raw_note_id;
  std::string text;
  SdohLabel label;
  std::size_t round_index;
};

enum class SessionStatus { Running, Succeeded, ThresholdNotReached };

struct AdvanceResult {
  double accuracy = 0.0;
  bool accepted_round = false;
  bool optimized = false;
  SessionStatus status = SessionStatus::Running;
  std::optional<std::string> next_batch_id;
};

/// Stepwise augmenter loop for one label.
///
/// start() draws `batch_size` raw notes and generates the first batch.
/// Verdicts arrive through record_verdict(). advance() scores the batch:
/// passed items join the accepted set (their raw notes stay in_use until
/// quality control), rejected and failed items' raw notes go back to the
/// pool. At or above threshold the session succeeds; below it the prompt is
/// revised and a new batch generated, unless max_rounds is spent.
class AugmentationSession {
 public:
  AugmentationSession(SdohLabel label, NotePool& pool, Gateway& gateway, const Taxonomy& taxonomy,
                      AugmenterConfig config = {},
                      std::optional<std::string> initial_prompt = std::nullopt);

  const AugmentationBatch& start();
  void record_verdict(const std::string& item_id, bool passed,
                      std::optional<std::string> feedback = std::nullopt);
  AdvanceResult advance();

  const AugmenterState& state() const { return state_; }
  const AugmentationBatch& batch() const;
  bool has_batch() const { return batch_.has_value(); }
  const std::vector<AcceptedNote>& accepted() const { return accepted_; }
  const AugmenterConfig& config() const { return config_; }
  SessionStatus status() const { return status_; }
  std::size_t optimize_calls() const { return optimize_calls_; }

 private:
  void generate_round();

  NotePool& pool_;
  Gateway& gateway_;
  const Taxonomy& taxonomy_;
  AugmenterConfig config_;
  AugmenterState state_;
  std::optional<AugmentationBatch> batch_;
  std::vector<AcceptedNote> accepted_;
  SessionStatus status_ = SessionStatus::Running;
  std::size_t optimize_calls_ = 0;
};

struct AugmentationResult {
  AugmenterState state;
  std::vector<AcceptedNote> accepted;
  std::size_t optimize_calls = 0;
};

/// Raised when max_rounds pass without reaching the threshold; carries the
/// final state and everything accepted along the way.
class ThresholdNotReachedError : public Error {
 public:
  explicit ThresholdNotReachedError(AugmentationResult result);
  const AugmentationResult& result() const { return result_; }

 private:
  AugmentationResult result_;
};

/// Supplies verdicts for a freshly generated batch (human review transport
/// or a scripted driver). It must verdict every non-failed item.
using VerdictSource = std::function<void(AugmentationSession& session)>;

AugmentationResult run_until_threshold(SdohLabel label, NotePool& pool, Gateway& gateway,
                                       const Taxonomy& taxonomy, const VerdictSource& verdicts,
                                       const AugmenterConfig& config = {},
                                       std::optional<std::string> initial_prompt = std::nullopt);

}  // namespace sdoh
