// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

// Built-in expert definitions and few-shot snippets for the fourteen classes.
// A taxonomy config file can replace all of these without a rebuild.

#include "sdoh/taxonomy.hpp"

namespace sdoh {
namespace {

constexpr const char* kPresentDef =
    "1. Eviction Present refers to the state where the eviction process has already been fully "
    "concluded, and the tenant has been legally removed from the property. All legal proceedings, "
    "such as notices and hearings, have been completed, and the tenant no longer has access to the "
    "property.\n"
    "- Consideration: When generating the note, it should mention that the eviction has already "
    "taken place, and the tenant is no longer living at or has access to the property.\n";

constexpr const char* kMrDef =
    "1. Mutual Rescission (mr) refers to a specific legal agreement in which both the landlord and "
    "tenant agree to terminate the lease early. This occurs after eviction proceedings have started, "
    "but the eviction process has not yet reached its final stage. As a result of this agreement, the "
    "tenant voluntarily vacates the rental property, and the eviction process is stopped before "
    "completion. All necessary legal proceedings are concluded, and the tenant no longer has access to "
    "the property.\n"
    "- Consideration: When generating the note, it should mention that the Mutual Rescission has "
    "already taken place, the eviction process had already stopped, and the tenant is no longer living "
    "at or has access to the property.\n";

std::vector<LabelDefinition> builtin_definitions() {
  std::vector<LabelDefinition> defs;

  defs.push_back({SdohLabel::EvictionPresentCurrent,
                  std::string(kPresentDef) +
                      "2. Current refers to events related to eviction that happened currently or "
                      "recently, with specificity about the timing. This includes cases where the "
                      "eviction event occurred in the current year (e.g., \"this year,\" \"last "
                      "month\", \"last week\", \"several months ago,\" or \"a few months ago\", "
                      "\"recently\"...).\n"
                      "- Consideration: The note should mention that the event was in the current "
                      "year, providing some specific time reference.",
                  {}});

  defs.push_back({SdohLabel::EvictionPresentHistory,
                  std::string(kPresentDef) +
                      "2. History refers to events related to eviction that happened in the past, but "
                      "with less specificity about the timing. This includes cases where the eviction "
                      "event occurred in the distant past (e.g., \"last year,\" \"several years ago,\" "
                      "or \"a few years ago\"), or where the mutual rescission agreement or eviction "
                      "action itself isn't explicitly stated.\n"
                      "- Consideration: The note should mention that the event was in the past, "
                      "providing some general time reference, but without specifying the exact date "
                      "or events.",
                  {}});

  defs.push_back(
      {SdohLabel::EvictionPending,
       "Eviction Pending refers to a situation where eviction proceedings have been initiated but are "
       "not yet complete. The tenant is still in the property, and there is still an opportunity for "
       "negotiation, remediation, or resolution before a final court decision or physical removal "
       "occurs. This state indicates that while the eviction process has started, the outcome is still "
       "undecided, and there is a potential for the tenant to address the issue and avoid eviction.\n"
       "- Distinction from Completed Eviction: Unlike a completed eviction where the tenant has already "
       "been removed, eviction-pending indicates that the tenant has received a notice, but there has "
       "been no final court order or physical removal. The tenant may negotiate, pay overdue rent, or "
       "comply with other conditions to potentially stop the eviction process.",
       {"The tenant received an eviction notice recently, but negotiations with the landlord to pay "
        "overdue rent are still ongoing.",
        "A few months ago, the landlord filed for eviction due to nonpayment, but the case is still "
        "pending in court, giving the tenant a chance to settle.",
        "Currently, the tenant is under an eviction notice but is working with a housing advocate to "
        "resolve the issue before the court date."}});

  defs.push_back(
      {SdohLabel::EvictionHypothetical,
       "Eviction Hypothetical refers to situations where the eviction process is anticipated or "
       "expected to occur but has not yet been initiated. The landlord has expressed an intention to "
       "proceed with eviction but has not issued any notice. The tenant is still in the property, and "
       "the eviction is expected to occur in the future, though the exact timeline may vary based on "
       "the tenant's actions or further legal procedures.\n"
       "- Time Frame: \"hypothetical\" in this context refers to actions or plans related to eviction "
       "that are expected to occur soon. This could include statements like \"in the coming weeks,\" "
       "\"next month,\" or \"soon,\" indicating that the eviction is planned but not yet happened.",
       {"The landlord has given the tenant a final warning, and eviction proceedings are expected to "
        "start next month if the rent is not paid.",
        "The tenant has been notified that they must vacate the premises in the coming weeks due to "
        "repeated violations of the lease.",
        "Eviction is planned for the near future, as the landlord has expressed intent to reclaim the "
        "property due to nonpayment.",
        "The landlord mentioned that they will file for eviction soon if the tenant does not comply "
        "with the notice to remedy the situation.",
        "Next week, the landlord plans to serve an eviction notice due to ongoing illegal activities on "
        "the property."}});

  defs.push_back({SdohLabel::EvictionMrCurrent,
                  std::string(kMrDef) +
                      "2. Current means that the agreement or action related to mutual rescission is "
                      "mentioned within a recent period (e.g., \"a few months ago,\" \"recently,\" "
                      "\"this year\").",
                  {}});

  defs.push_back({SdohLabel::EvictionMrHistory,
                  std::string(kMrDef) +
                      "2. History refers to events related to eviction that happened in the past, but "
                      "with less specificity about the timing. This includes cases where the Mutual "
                      "Rescission occurred in the distant past (e.g., \"last year,\" \"several years "
                      "ago,\" or \"a few years ago\"), or where the mutual rescission agreement or "
                      "eviction action itself isn't explicitly stated.\n"
                      "- Consideration: The note should mention that the event was in the past, "
                      "providing some general time reference, but without specifying the exact date "
                      "or events.",
                  {}});

  defs.push_back({SdohLabel::EvictionAbsent,
                  "The text clearly states \"never evicted\" or \"no history of eviction\".",
                  {}});

  defs.push_back(
      {SdohLabel::Homelessness,
       "An individual or family who lacks a fixed, regular, and adequate nighttime residence, such as "
       "those living in emergency shelters, transitional housing, or places not meant for habitation.",
       {"...is homeless and lives in a shelter...", "...contact one of the homeless shelters...",
        "...found it difficult to secure housing and ended up living in his car...",
        "...relying on friends and temporary shelters for support...",
        "...is actively seeking employment and more permanent housing but has faced numerous "
        "obstacles...",
        "living on the streets...", "...living in a homeless encampment...", "...couch surfing..."}});

  defs.push_back(
      {SdohLabel::InadequateHousing,
       "Inadequate housing is defined as an occupied housing unit that has moderate or severe physical "
       "problems (e.g., deficiencies in plumbing, heating, electricity, hallways, and upkeep). Examples "
       "of moderate physical problems in a unit include two or more breakdowns of the toilets that "
       "lasted more than 6 months, unvented primary heating equipment, or lack of a complete kitchen "
       "facility in the unit. Severe physical problems include lack of running hot or cold water, lack "
       "of a working toilet, and exposed wiring.",
       {"...lives in an old apartment building with severe structural issues...",
        "...live in an apartment that lacks a functioning heating system...",
        "...a family, consisting of six members spanning three generations, lives in a cramped "
        "two-bedroom apartment...",
        "...unsafe housing situation...", "...unsanitary living conditions...",
        "...polluted living environment...", "...lead and toxic exposures in home..."}});

  defs.push_back(
      {SdohLabel::LackOfAdequateFood,
       "Food insecurity is the limited or inadequate access to food because of insufficient money and "
       "other resources for food. Food security, at the individual, household, national, regional, and "
       "global levels [is achieved] when all people, at all times, have physical and economic access "
       "to sufficient, safe, and nutritious food to meet their dietary needs and food preferences for "
       "an active and healthy life. This definition suggests that food insecurity is the absence of one "
       "or more of these conditions.",
       {"...lack the variety and nutrients...", "...frequently goes hungry or eats whatever is available...",
        "...no supermarkets...",
        "...difficult to access better food sources outside the neighborhood...",
        "...uses food pantries/soup kitchens for food...", "...does not have stable food sources...",
        "...lives in a food desert..."}});

  defs.push_back(
      {SdohLabel::FinancialInsecurity,
       "Economic insecurity can be defined as \"the anxiety produced by the possible exposure to "
       "adverse economic events and by the anticipation of the difficulty to recover from them\". "
       "Examples could include a fear of unemployment, an expectation of a worsening financial "
       "situation, money mismanagement, or being financially exploited or a victim of financial scam.",
       {"...has been having a lot of stress recently due to financial concerns.",
        "...was very concerned about the financial burden of hospitalization, medications and "
        "potential surgery.",
        "Rising living costs, including healthcare and housing, have made it difficult for them to "
        "cover their monthly expenses.",
        "The irregular income and lack of benefits make it difficult to budget and plan for the future.",
        "...has experienced several months of financial difficulty due to job loss.",
        "...not managing money well...", "...lacks financial literacy...", "...mismanaging funds.",
        "...lack of stable income..."}});

  defs.push_back(
      {SdohLabel::HousingInstability,
       "Housing instability is variably defined as having difficulty paying rent, spending more than "
       "50% of household income on housing, having frequent moves, living in overcrowded conditions, or "
       "doubling up with friends and relatives. Unstably housed, housing insecure, or in a temporary "
       "housing situation. At risk of being homeless or at imminent risk of being homeless.",
       {"...has moved three times...", "...fell behind on his rent payments...",
        "...live together with three families to share...", "...couch surfing...",
        "...temporarily staying with friends/family...", "...staying in a motel/hotel...",
        "...in a temporary housing situation...", "...at risk of losing their housing..."}});

  defs.push_back(
      {SdohLabel::MaterialHardship,
       "Material hardships, defined as difficulty meeting basic needs such as food, housing or medical "
       "care, are common among low-income households.",
       {"Their electricity was cut off because they couldn't make the payments.",
        "...cannot afford to buy winter coats or shoes that fit correctly.",
        "...cannot afford the necessary school supplies and textbooks for their three children.",
        "...cannot afford to participate in health and wellness activities such as exercise classes, "
        "which are essential for managing his chronic conditions."}});

  defs.push_back(
      {SdohLabel::TransportationInsecurity,
       "Transportation insecurity occurs when a person is regularly unable to get from place to place "
       "in a safe or timely manner because of a lack of resources. This can limit a person's access to "
       "work, school, medical care, social activities, and more.",
       {"...lives in a rural area where there are no public transportation options. The nearest town "
        "with essential services such as grocery stores, schools, and healthcare facilities is 20 miles "
        "away.",
        "Buses and trains are often delayed or overcrowded, making it difficult for her to get to work "
        "on time.",
        "...can't afford the transportation fare, he and his children have to walk long distances, "
        "often in unsafe conditions.",
        "...uses a wheelchair and often finds that public transportation in her city is not fully "
        "accessible.",
        "...does not own a car...", "...does not have bus passes..."}});

  return defs;
}

}  // namespace

const Taxonomy& Taxonomy::builtin() {
  static const Taxonomy instance(builtin_definitions());
  return instance;
}

}  // namespace sdoh
