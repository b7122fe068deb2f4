// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/ingest.hpp"

#include <cctype>
#include <mutex>

#include "sdoh/error.hpp"
#include "sdoh/util.hpp"

namespace sdoh {
namespace {

constexpr std::string_view kHeaderPhrase = "social history";

struct Line {
  std::size_t begin;  // offset of first char
  std::size_t end;    // offset one past last char, excluding '\n'
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back({pos, end});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

// `^[A-Z][A-Za-z ]{2,40}:`
bool is_section_header(std::string_view line) {
  if (line.empty() || line[0] < 'A' || line[0] > 'Z') return false;
  std::size_t p = 1;
  while (p < line.size() && (std::isalpha(static_cast<unsigned char>(line[p])) || line[p] == ' ')) {
    ++p;
  }
  return p >= 3 && p <= 41 && p < line.size() && line[p] == ':';
}

// Offset just past the header (and its colon) when `line` is a social-history
// header, else npos.
std::size_t match_history_header(std::string_view line) {
  std::size_t p = 0;
  while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
  if (line.size() - p < kHeaderPhrase.size()) return std::string_view::npos;
  if (to_lower(line.substr(p, kHeaderPhrase.size())) != kHeaderPhrase) {
    return std::string_view::npos;
  }
  p += kHeaderPhrase.size();
  std::size_t q = p;
  while (q < line.size() && (line[q] == ' ' || line[q] == '\t')) ++q;
  if (q < line.size() && line[q] == ':') return q + 1;
  return is_blank(line.substr(p)) ? line.size() : std::string_view::npos;
}

bool phrase_matches(std::string_view haystack, std::string_view phrase) {
  if (phrase.empty()) return false;
  const bool bounded = phrase.size() <= 5;
  for (auto pos = haystack.find(phrase); pos != std::string_view::npos;
       pos = haystack.find(phrase, pos + 1)) {
    if (!bounded) return true;
    const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    const auto after = pos + phrase.size();
    const bool right_ok = after >= haystack.size() || !is_word_char(haystack[after]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(NoteSource source) {
  switch (source) {
    case NoteSource::MimicLike: return "mimic_like";
    case NoteSource::PmcLike: return "pmc_like";
    case NoteSource::User: return "user";
  }
  return "";
}

std::string_view to_string(NoteState state) {
  switch (state) {
    case NoteState::Available: return "available";
    case NoteState::InUse: return "in_use";
    case NoteState::Consumed: return "consumed";
  }
  return "";
}

NoteSource parse_note_source(std::string_view text) {
  if (text == "mimic_like") return NoteSource::MimicLike;
  if (text == "pmc_like") return NoteSource::PmcLike;
  if (text == "user") return NoteSource::User;
  throw Error(ErrorCode::InvalidArgument, "unknown note source '" + std::string(text) + "'");
}

NoteState parse_note_state(std::string_view text) {
  if (text == "available") return NoteState::Available;
  if (text == "in_use") return NoteState::InUse;
  if (text == "consumed") return NoteState::Consumed;
  throw Error(ErrorCode::InvalidArgument, "unknown note state '" + std::string(text) + "'");
}

nlohmann::json to_json(const RawNote& note) {
  nlohmann::json j = {{"id", note.id},
                      {"text", note.full_text},
                      {"source", to_string(note.source)},
                      {"state", to_string(note.state)}};
  j["social_history"] = note.social_history ? nlohmann::json(*note.social_history) : nlohmann::json();
  return j;
}

RawNote raw_note_from_json(const nlohmann::json& j) {
  RawNote note;
  note.id = j.at("id").get<std::string>();
  note.full_text = j.at("text").get<std::string>();
  note.source = parse_note_source(j.value("source", std::string("user")));
  note.state = parse_note_state(j.value("state", std::string("available")));
  if (j.contains("social_history") && j["social_history"].is_string()) {
    note.social_history = j["social_history"].get<std::string>();
  } else if (!j.contains("social_history")) {
    note.social_history = extract_social_history(note.full_text);
  }
  return note;
}

std::optional<std::string> extract_social_history(std::string_view full_text) {
  const auto lines = split_lines(full_text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = full_text.substr(lines[i].begin, lines[i].end - lines[i].begin);
    const auto header_end = match_history_header(line);
    if (header_end == std::string_view::npos) continue;

    // Inline content on the header line belongs to the section.
    std::size_t start = lines[i].begin + header_end;
    std::size_t first_line = i + 1;
    const auto inline_rest = full_text.substr(start, lines[i].end - start);
    if (!is_blank(inline_rest)) {
      while (full_text[start] == ' ' || full_text[start] == '\t') ++start;
    } else {
      // Section body starts on the next non-blank line.
      start = lines[i].end;
      while (first_line < lines.size()) {
        const auto& l = lines[first_line];
        if (!is_blank(full_text.substr(l.begin, l.end - l.begin))) break;
        ++first_line;
      }
      if (first_line < lines.size()) start = lines[first_line].begin;
    }

    std::size_t end = full_text.size();
    for (std::size_t k = first_line; k < lines.size(); ++k) {
      const auto l = full_text.substr(lines[k].begin, lines[k].end - lines[k].begin);
      if (is_section_header(l)) {
        end = lines[k].begin;
        break;
      }
      if (k + 1 < lines.size() && is_blank(l) &&
          is_blank(full_text.substr(lines[k + 1].begin, lines[k + 1].end - lines[k + 1].begin))) {
        end = lines[k].begin;
        break;
      }
    }
    if (end < start) end = start;
    auto body = full_text.substr(start, end - start);
    // Drop trailing whitespace only; the result stays a substring.
    const auto last = body.find_last_not_of(" \t\r\n");
    body = last == std::string_view::npos ? body.substr(0, 0) : body.substr(0, last + 1);
    return std::string(body);
  }
  return std::nullopt;
}

KeywordTable::KeywordTable(std::map<SdohLabel, std::vector<std::string>> phrases)
    : phrases_(std::move(phrases)) {
  for (const auto& [label, list] : phrases_) {
    if (label == SdohLabel::Other) {
      throw Error(ErrorCode::InvalidLabel, "keyword table cannot target 'Other'");
    }
    if (list.empty()) {
      throw Error(ErrorCode::ConfigError,
                  "empty keyword list for " + std::string(canonical_name(label)));
    }
    for (const auto& phrase : list) {
      if (trim(phrase).empty()) {
        throw Error(ErrorCode::ConfigError,
                    "empty keyword for " + std::string(canonical_name(label)));
      }
    }
  }
}

const KeywordTable& KeywordTable::builtin() {
  static const KeywordTable table({
      {SdohLabel::Homelessness,
       {"homeless", "homelessness", "shelter", "transitional housing", "living in car",
        "living on streets", "couch surfing", "lacks housing", "no fixed residence",
        "no permanent home"}},
      {SdohLabel::InadequateHousing,
       {"inadequate housing", "structural issues", "structural problems", "deficiencies in plumbing",
        "heating problems", "no heating", "electrical problems", "lack of running water",
        "broken toilet", "no toilet", "no kitchen", "cramped apartment", "overcrowded",
        "unsafe housing", "unsanitary living", "polluted environment", "lead exposure",
        "toxic exposure", "mold"}},
      {SdohLabel::LackOfAdequateFood,
       {"food insecurity", "limited access to food", "insufficient food", "lacks variety",
        "lacks nutrients", "no supermarkets", "difficult to access food", "unstable food sources",
        "cannot afford food", "malnutrition", "undernourished", "skipping meals",
        "reliance on food assistance"}},
      {SdohLabel::FinancialInsecurity,
       {"financial insecurity", "economic insecurity", "financial concerns", "financial stress",
        "financial burden", "affordability issues", "rising living costs",
        "difficulty covering expenses", "budget difficulties", "lacks financial literacy",
        "no stable income", "debt", "financial hardship"}},
      {SdohLabel::HousingInstability,
       {"housing instability", "difficulty paying rent", "frequent moves", "multiple moves",
        "families sharing housing"}},
      {SdohLabel::MaterialHardship,
       {"material hardship", "difficulty meeting basic needs", "utilities cut off",
        "cannot afford clothing", "winter coats", "cannot afford school supplies",
        "cannot afford health activities", "limited resources for essentials",
        "unable to afford medications", "basic needs not met", "lacks essential household items"}},
      {SdohLabel::TransportationInsecurity,
       {"transportation insecurity", "lack of transportation", "no public transportation",
        "transportation issues", "cannot afford transportation fare", "long walking distances",
        "inaccessible transportation", "no car", "unreliable transportation", "limited mobility",
        "transportation costs prohibitive"}},
  });
  return table;
}

KeywordTable KeywordTable::from_json(const nlohmann::json& doc) {
  std::map<SdohLabel, std::vector<std::string>> phrases;
  for (const auto& [key, list] : doc.items()) {
    phrases[parse_label(key)] = list.get<std::vector<std::string>>();
  }
  return KeywordTable(std::move(phrases));
}

nlohmann::json KeywordTable::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [label, list] : phrases_) doc[std::string(canonical_name(label))] = list;
  return doc;
}

std::set<SdohLabel> keyword_scan(std::string_view text, const KeywordTable& table) {
  const auto haystack = normalize_whitespace_lower(text);
  std::set<SdohLabel> found;
  for (const auto& [label, list] : table.phrases()) {
    for (const auto& phrase : list) {
      if (phrase_matches(haystack, normalize_whitespace_lower(phrase))) {
        found.insert(label);
        break;
      }
    }
  }
  return found;
}

NotePool::NotePool(std::vector<RawNote> notes) : notes_(std::move(notes)) {
  for (std::size_t i = 0; i < notes_.size(); ++i) {
    if (!index_.emplace(notes_[i].id, i).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate raw note id '" + notes_[i].id + "'");
    }
  }
}

NotePool::NotePool(const NotePool& other) {
  std::shared_lock lock(other.mutex_);
  notes_ = other.notes_;
  index_ = other.index_;
}

NotePool& NotePool::operator=(const NotePool& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_);
  std::shared_lock other_lock(other.mutex_);
  notes_ = other.notes_;
  index_ = other.index_;
  return *this;
}

std::vector<RawNote> NotePool::draw(std::size_t n) {
  std::scoped_lock lock(mutex_);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < notes_.size() && picked.size() < n; ++i) {
    if (notes_[i].state == NoteState::Available) picked.push_back(i);
  }
  if (picked.size() < n) {
    throw Error(ErrorCode::PoolExhausted, "requested " + std::to_string(n) + " notes, only " +
                                              std::to_string(picked.size()) + " available");
  }
  std::vector<RawNote> out;
  out.reserve(n);
  for (auto i : picked) {
    notes_[i].state = NoteState::InUse;
    out.push_back(notes_[i]);
  }
  return out;
}

RawNote& NotePool::find_locked(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownNote, "no raw note '" + id + "'");
  return notes_[it->second];
}

void NotePool::return_note(const std::string& id) {
  std::scoped_lock lock(mutex_);
  auto& note = find_locked(id);
  if (note.state != NoteState::InUse) {
    throw Error(ErrorCode::InvalidState, "raw note '" + id + "' is " +
                                             std::string(to_string(note.state)) + ", not in_use");
  }
  note.state = NoteState::Available;
}

void NotePool::consume(const std::string& id) {
  std::scoped_lock lock(mutex_);
  auto& note = find_locked(id);
  if (note.state != NoteState::InUse) {
    throw Error(ErrorCode::InvalidState, "raw note '" + id + "' is " +
                                             std::string(to_string(note.state)) + ", not in_use");
  }
  note.state = NoteState::Consumed;
}

RawNote NotePool::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownNote, "no raw note '" + id + "'");
  return notes_[it->second];
}

std::size_t NotePool::size() const {
  std::shared_lock lock(mutex_);
  return notes_.size();
}

std::size_t NotePool::count(NoteState state) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& note : notes_) n += note.state == state ? 1 : 0;
  return n;
}

std::vector<RawNote> NotePool::snapshot() const {
  std::shared_lock lock(mutex_);
  return notes_;
}

NotePool NotePool::load(const std::filesystem::path& path) {
  std::vector<RawNote> notes;
  for (const auto& row : read_ndjson(path)) notes.push_back(raw_note_from_json(row));
  return NotePool(std::move(notes));
}

void NotePool::save(const std::filesystem::path& path) const {
  std::vector<nlohmann::json> rows;
  for (const auto& note : snapshot()) rows.push_back(to_json(note));
  write_ndjson(path, rows);
}

std::vector<RawNote> ingest_raw_notes(const std::filesystem::path& path) {
  std::vector<RawNote> notes;
  for (const auto& row : read_ndjson(path)) {
    RawNote note;
    note.id = row.at("id").get<std::string>();
    note.full_text = row.at("text").get<std::string>();
    note.source = parse_note_source(row.value("source", std::string("user")));
    note.social_history = extract_social_history(note.full_text);
    notes.push_back(std::move(note));
  }
  return notes;
}

}  // namespace sdoh
