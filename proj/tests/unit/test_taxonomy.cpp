// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "sdoh/taxonomy.hpp"

using namespace sdoh;

TEST_CASE("fourteen classes with unique canonical names") {
  std::set<std::string_view> names;
  for (auto l : kAllClasses) names.insert(canonical_name(l));
  CHECK(names.size() == 14);
  CHECK(names.count("Other") == 0);
  CHECK(canonical_name(SdohLabel::Other) == "Other");
}

TEST_CASE("tiers partition the classes") {
  int t1 = 0, t2 = 0, t3 = 0;
  for (auto l : kAllClasses) {
    switch (tier_of(l)) {
      case Tier::Tier1: ++t1; break;
      case Tier::Tier2: ++t2; break;
      case Tier::Tier3Eviction: ++t3; break;
      case Tier::Sentinel: FAIL("sentinel in class list");
    }
  }
  CHECK(t1 == 3);
  CHECK(t2 == 4);
  CHECK(t3 == 7);
  CHECK(tier_of(SdohLabel::Other) == Tier::Sentinel);
}

TEST_CASE("ICD-10 codes") {
  CHECK(icd10_code(SdohLabel::Homelessness) == "Z59.0");
  CHECK(icd10_code(SdohLabel::InadequateHousing) == "Z59.1");
  CHECK(icd10_code(SdohLabel::LackOfAdequateFood) == "Z59.4");
  CHECK(icd10_code(SdohLabel::HousingInstability) == "Z59.81");
  CHECK(icd10_code(SdohLabel::TransportationInsecurity) == "Z59.82");
  CHECK(icd10_code(SdohLabel::FinancialInsecurity) == "Z59.86");
  CHECK(icd10_code(SdohLabel::MaterialHardship) == "Z59.87");
  for (auto l : kEvictionClasses) CHECK(icd10_code(l) == "Z59.89");
}

TEST_CASE("parse_label round-trips and rejects unknown tokens") {
  for (auto l : kAllClasses) CHECK(parse_label(canonical_name(l)) == l);
  CHECK(parse_label("Other") == SdohLabel::Other);
  CHECK_THROWS_AS(parse_label("t3_Eviction_maybe"), Error);
  try {
    parse_label("homelessness");
    FAIL("expected InvalidLabel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidLabel);
  }
  CHECK_FALSE(try_parse_label("t1_homelessness").has_value());
}

TEST_CASE("eviction membership") {
  for (auto l : kEvictionClasses) CHECK(is_eviction_related(l));
  for (auto l : kNonEvictionClasses) CHECK_FALSE(is_eviction_related(l));
  CHECK_THROWS_AS(is_eviction_related(SdohLabel::Other), Error);
}

TEST_CASE("builtin taxonomy has a definition for every class") {
  const auto& tax = Taxonomy::builtin();
  for (auto l : kAllClasses) {
    const auto& def = tax.definition_of(l);
    CHECK(def.label == l);
    CHECK_FALSE(def.definition_text.empty());
  }
  CHECK(tax.definition_of(SdohLabel::EvictionPending).few_shot_snippets.size() > 0);
  CHECK(tax.definition_of(SdohLabel::EvictionMrCurrent).definition_text.find("mutual rescission") !=
        std::string::npos);
  try {
    tax.definition_of(SdohLabel::Other);
    FAIL("expected MissingDefinition");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingDefinition);
  }
}

TEST_CASE("taxonomy JSON round trip") {
  const auto doc = Taxonomy::builtin().to_json();
  const auto again = Taxonomy::from_json(doc);
  for (auto l : kAllClasses) {
    CHECK(again.definition_of(l).definition_text == Taxonomy::builtin().definition_of(l).definition_text);
    CHECK(again.definition_of(l).few_shot_snippets == Taxonomy::builtin().definition_of(l).few_shot_snippets);
  }
}

TEST_CASE("taxonomy construction validation") {
  std::vector<LabelDefinition> defs;
  for (auto l : kAllClasses) defs.push_back(Taxonomy::builtin().definition_of(l));

  SUBCASE("missing class") {
    defs.pop_back();
    try {
      Taxonomy t(defs);
      FAIL("expected MissingDefinition");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingDefinition);
    }
  }
  SUBCASE("empty definition") {
    defs[3].definition_text = "  ";
    try {
      Taxonomy t(defs);
      FAIL("expected MissingDefinition");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingDefinition);
    }
  }
  SUBCASE("duplicate class") {
    defs.push_back(defs.front());
    try {
      Taxonomy t(defs);
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
    }
  }
  SUBCASE("Other is not a definable class") {
    defs.push_back({SdohLabel::Other, "catch-all", {}});
    CHECK_THROWS_AS(Taxonomy{defs}, Error);
  }
}

TEST_CASE("label JSON conversion") {
  nlohmann::json j = SdohLabel::EvictionMrHistory;
  CHECK(j == "t3_Eviction_mr_history");
  CHECK(j.get<SdohLabel>() == SdohLabel::EvictionMrHistory);
}
