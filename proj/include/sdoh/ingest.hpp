// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sdoh/taxonomy.hpp"

namespace sdoh {

enum class NoteSource { MimicLike, PmcLike, User };
enum class NoteState { Available, InUse, Consumed };

std::string_view to_string(NoteSource source);
std::string_view to_string(NoteState state);
NoteSource parse_note_source(std::string_view text);
NoteState parse_note_state(std::string_view text);

struct RawNote {
  std::string id;
  std::string full_text;
  std::optional<std::string> social_history;
  NoteSource source = NoteSource::User;
  NoteState state = NoteState::Available;

  /// Social-history section when present, otherwise the whole note.
  const std::string& augmentation_input() const {
    return social_history ? *social_history : full_text;
  }
};

nlohmann::json to_json(const RawNote& note);
RawNote raw_note_from_json(const nlohmann::json& j);

/// Returns the body of the first "Social History" section (header at line
/// start, case-insensitive, optional colon). The section ends at the next
/// line shaped like `Header:` or at two consecutive blank lines. The result
/// is always a substring of `full_text`.
std::optional<std::string> extract_social_history(std::string_view full_text);

class KeywordTable {
 public:
  KeywordTable() = default;
  explicit KeywordTable(std::map<SdohLabel, std::vector<std::string>> phrases);

  /// Tier-1/tier-2 keyword lists used to pre-filter raw notes.
  static const KeywordTable& builtin();
  static KeywordTable from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const std::map<SdohLabel, std::vector<std::string>>& phrases() const { return phrases_; }

 private:
  std::map<SdohLabel, std::vector<std::string>> phrases_;
};

/// Case-insensitive match on whitespace-normalized text. Phrases of five
/// characters or fewer must sit on word boundaries ("mold" does not match
/// "remodeled"); longer phrases match anywhere.
std::set<SdohLabel> keyword_scan(std::string_view text, const KeywordTable& table);

/// Raw-note pool with an available -> in_use -> {available, consumed} state
/// machine. Mutations take an exclusive lock; reads share it.
class NotePool {
 public:
  NotePool() = default;
  explicit NotePool(std::vector<RawNote> notes);

  NotePool(const NotePool& other);
  NotePool& operator=(const NotePool& other);

  /// Moves the first `n` available notes (insertion order) to in_use.
  std::vector<RawNote> draw(std::size_t n);
  /// in_use -> available. Throws InvalidState otherwise.
  void return_note(const std::string& id);
  /// in_use -> consumed.
  void consume(const std::string& id);

  RawNote get(const std::string& id) const;
  std::size_t size() const;
  std::size_t count(NoteState state) const;
  std::vector<RawNote> snapshot() const;

  static NotePool load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  RawNote& find_locked(const std::string& id);

  mutable std::shared_mutex mutex_;
  std::vector<RawNote> notes_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads `{id, text, source}` lines, extracting each note's social-history
/// section. Notes keep their file order.
std::vector<RawNote> ingest_raw_notes(const std::filesystem::path& path);

}  // namespace sdoh
