// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdoh/error.hpp"

namespace sdoh {

enum class Tier { Tier1, Tier2, Tier3Eviction, Sentinel };

/// The fourteen housing/economic SDoH classes plus the `Other` sentinel that
/// annotators may emit. `Other` is never a gold augmentation target.
enum class SdohLabel : std::uint8_t {
  Homelessness,
  InadequateHousing,
  LackOfAdequateFood,
  FinancialInsecurity,
  HousingInstability,
  MaterialHardship,
  TransportationInsecurity,
  EvictionAbsent,
  EvictionPresentHistory,
  EvictionPresentCurrent,
  EvictionPending,
  EvictionHypothetical,
  EvictionMrHistory,
  EvictionMrCurrent,
  Other,
};

inline constexpr std::size_t kNumClasses = 14;

inline constexpr std::array<SdohLabel, kNumClasses> kAllClasses = {
    SdohLabel::Homelessness,           SdohLabel::InadequateHousing,
    SdohLabel::LackOfAdequateFood,     SdohLabel::FinancialInsecurity,
    SdohLabel::HousingInstability,     SdohLabel::MaterialHardship,
    SdohLabel::TransportationInsecurity, SdohLabel::EvictionAbsent,
    SdohLabel::EvictionPresentHistory, SdohLabel::EvictionPresentCurrent,
    SdohLabel::EvictionPending,        SdohLabel::EvictionHypothetical,
    SdohLabel::EvictionMrHistory,      SdohLabel::EvictionMrCurrent,
};

inline constexpr std::array<SdohLabel, 7> kEvictionClasses = {
    SdohLabel::EvictionAbsent,         SdohLabel::EvictionPresentHistory,
    SdohLabel::EvictionPresentCurrent, SdohLabel::EvictionPending,
    SdohLabel::EvictionHypothetical,   SdohLabel::EvictionMrHistory,
    SdohLabel::EvictionMrCurrent,
};

inline constexpr std::array<SdohLabel, 7> kNonEvictionClasses = {
    SdohLabel::Homelessness,        SdohLabel::InadequateHousing,
    SdohLabel::LackOfAdequateFood,  SdohLabel::FinancialInsecurity,
    SdohLabel::HousingInstability,  SdohLabel::MaterialHardship,
    SdohLabel::TransportationInsecurity,
};

/// Exact token emitted and parsed by annotators, e.g. "t3_Eviction_pending".
std::string_view canonical_name(SdohLabel label);
/// Table-style name without tier prefix, e.g. "Eviction_pending".
std::string_view short_name(SdohLabel label);
/// ICD-10-CM Z59 association string (metadata only).
std::string_view icd10_code(SdohLabel label);
Tier tier_of(SdohLabel label);

/// Case-sensitive exact match against canonical names; "Other" yields the
/// sentinel. Throws Error(InvalidLabel) for anything else.
SdohLabel parse_label(std::string_view text);
std::optional<SdohLabel> try_parse_label(std::string_view text);

/// True iff the label is one of the seven tier-3 eviction classes.
/// Throws Error(InvalidLabel) for the sentinel.
bool is_eviction_related(SdohLabel label);

struct LabelDefinition {
  SdohLabel label;
  std::string definition_text;
  std::vector<std::string> few_shot_snippets;
};

/// Registry of label definitions. Immutable once constructed; construction
/// validates that all fourteen classes are present with non-empty text.
class Taxonomy {
 public:
  explicit Taxonomy(std::vector<LabelDefinition> definitions);

  /// Expert definitions shipped with the tool.
  static const Taxonomy& builtin();

  /// Reads `{"labels": [{"canonical_name", "tier", "definition_text",
  /// "few_shot_snippets"}, ...]}`.
  static Taxonomy from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const LabelDefinition& definition_of(SdohLabel label) const;

 private:
  std::array<std::optional<LabelDefinition>, kNumClasses> defs_;
};

void to_json(nlohmann::json& j, SdohLabel label);
void from_json(const nlohmann::json& j, SdohLabel& label);

}  // namespace sdoh
