// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/taxonomy.hpp"

#include <algorithm>

#include "sdoh/error.hpp"
#include "sdoh/util.hpp"

namespace sdoh {
namespace {

struct LabelInfo {
  SdohLabel label;
  std::string_view canonical;
  std::string_view short_name;
  std::string_view icd10;
  Tier tier;
};

constexpr std::array<LabelInfo, kNumClasses + 1> kLabelInfo = {{
    {SdohLabel::Homelessness, "t1_Homelessness", "Homelessness", "Z59.0", Tier::Tier1},
    {SdohLabel::InadequateHousing, "t1_InadequateHousing", "InadequateHousing", "Z59.1", Tier::Tier1},
    {SdohLabel::LackOfAdequateFood, "t1_LackOfAdequateFood", "LackOfAdequateFood", "Z59.4", Tier::Tier1},
    {SdohLabel::FinancialInsecurity, "t2_FinancialInsecurity", "FinancialInsecurity", "Z59.86", Tier::Tier2},
    {SdohLabel::HousingInstability, "t2_HousingInstability", "HousingInstability", "Z59.81", Tier::Tier2},
    {SdohLabel::MaterialHardship, "t2_MaterialHardship", "MaterialHardship", "Z59.87", Tier::Tier2},
    {SdohLabel::TransportationInsecurity, "t2_TransportationInsecurity", "TransportationInsecurity", "Z59.82", Tier::Tier2},
    {SdohLabel::EvictionAbsent, "t3_Eviction_absent", "Eviction_absent", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::EvictionPresentHistory, "t3_Eviction_present_history", "Eviction_present_history", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::EvictionPresentCurrent, "t3_Eviction_present_current", "Eviction_present_current", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::EvictionPending, "t3_Eviction_pending", "Eviction_pending", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::EvictionHypothetical, "t3_Eviction_hypothetical", "Eviction_hypothetical", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::EvictionMrHistory, "t3_Eviction_mr_history", "Eviction_mr_history", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::EvictionMrCurrent, "t3_Eviction_mr_current", "Eviction_mr_current", "Z59.89", Tier::Tier3Eviction},
    {SdohLabel::Other, "Other", "Other", "", Tier::Sentinel},
}};

const LabelInfo& info(SdohLabel label) {
  return kLabelInfo[static_cast<std::size_t>(label)];
}

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::Tier1: return "tier1";
    case Tier::Tier2: return "tier2";
    case Tier::Tier3Eviction: return "tier3_eviction";
    case Tier::Sentinel: return "sentinel";
  }
  return "";
}

}  // namespace

std::string_view canonical_name(SdohLabel label) { return info(label).canonical; }
std::string_view short_name(SdohLabel label) { return info(label).short_name; }
std::string_view icd10_code(SdohLabel label) { return info(label).icd10; }
Tier tier_of(SdohLabel label) { return info(label).tier; }

std::optional<SdohLabel> try_parse_label(std::string_view text) {
  for (const auto& entry : kLabelInfo) {
    if (entry.canonical == text) return entry.label;
  }
  return std::nullopt;
}

SdohLabel parse_label(std::string_view text) {
  if (auto label = try_parse_label(text)) return *label;
  throw Error(ErrorCode::InvalidLabel, "not a canonical label token: '" + std::string(text) + "'");
}

bool is_eviction_related(SdohLabel label) {
  if (label == SdohLabel::Other) {
    throw Error(ErrorCode::InvalidLabel, "'Other' is not one of the 14 classes");
  }
  return tier_of(label) == Tier::Tier3Eviction;
}

Taxonomy::Taxonomy(std::vector<LabelDefinition> definitions) {
  for (auto& def : definitions) {
    if (def.label == SdohLabel::Other) {
      throw Error(ErrorCode::InvalidLabel, "the 'Other' sentinel cannot carry a definition");
    }
    auto& slot = defs_[static_cast<std::size_t>(def.label)];
    if (slot) {
      throw Error(ErrorCode::ConfigError,
                  "duplicate definition for " + std::string(canonical_name(def.label)));
    }
    slot = std::move(def);
  }
  for (SdohLabel label : kAllClasses) {
    const auto& slot = defs_[static_cast<std::size_t>(label)];
    if (!slot) {
      throw Error(ErrorCode::MissingDefinition,
                  "no definition registered for " + std::string(canonical_name(label)));
    }
    if (trim(slot->definition_text).empty()) {
      throw Error(ErrorCode::MissingDefinition,
                  "empty definition for " + std::string(canonical_name(label)));
    }
  }
}

const LabelDefinition& Taxonomy::definition_of(SdohLabel label) const {
  if (label == SdohLabel::Other) {
    throw Error(ErrorCode::MissingDefinition, "the 'Other' sentinel has no definition");
  }
  return *defs_[static_cast<std::size_t>(label)];
}

Taxonomy Taxonomy::from_json(const nlohmann::json& doc) {
  if (!doc.contains("labels") || !doc["labels"].is_array()) {
    throw Error(ErrorCode::ConfigError, "taxonomy config needs a 'labels' array");
  }
  std::vector<LabelDefinition> defs;
  for (const auto& entry : doc["labels"]) {
    LabelDefinition def;
    def.label = parse_label(entry.at("canonical_name").get<std::string>());
    if (entry.contains("tier") &&
        entry["tier"].get<std::string>() != tier_name(tier_of(def.label))) {
      throw Error(ErrorCode::ConfigError,
                  "tier mismatch for " + std::string(canonical_name(def.label)));
    }
    def.definition_text = entry.value("definition_text", std::string{});
    def.few_shot_snippets = entry.value("few_shot_snippets", std::vector<std::string>{});
    defs.push_back(std::move(def));
  }
  return Taxonomy(std::move(defs));
}

nlohmann::json Taxonomy::to_json() const {
  nlohmann::json labels = nlohmann::json::array();
  for (SdohLabel label : kAllClasses) {
    const auto& def = definition_of(label);
    labels.push_back({{"canonical_name", canonical_name(label)},
                      {"tier", tier_name(tier_of(label))},
                      {"icd10", icd10_code(label)},
                      {"definition_text", def.definition_text},
                      {"few_shot_snippets", def.few_shot_snippets}});
  }
  return {{"labels", labels}};
}

void to_json(nlohmann::json& j, SdohLabel label) { j = canonical_name(label); }

void from_json(const nlohmann::json& j, SdohLabel& label) {
  label = parse_label(j.get<std::string>());
}

}  // namespace sdoh
