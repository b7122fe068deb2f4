// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/program.hpp"

#include <algorithm>

#include "sdoh/error.hpp"
#include "sdoh/taxonomy.hpp"

namespace sdoh {
namespace {

std::vector<std::string> tokens_for(std::span<const SdohLabel> labels) {
  std::vector<std::string> out;
  for (SdohLabel l : labels) out.emplace_back(canonical_name(l));
  out.emplace_back(canonical_name(SdohLabel::Other));
  return out;
}

constexpr std::string_view kBinaryInstruction =
    "Go through each sentence of the patient note. If a sentence reflects eviction-related social "
    "determinants of health (SDoH), assign the label \"Yes\", else annotate as label \"No\"";

constexpr std::string_view kEvictionInstruction =
    "Go through each sentence of the patient note. If a sentence reflects eviction-related social "
    "determinants of health (SDoH), assign the most appropriate label from the following list: "
    "\"t3_Eviction_absent\", \"t3_Eviction_present_history\", \"t3_Eviction_present_current\", "
    "\"t3_Eviction_pending\", \"t3_Eviction_hypothetical\", \"t3_Eviction_mr_history\", "
    "\"t3_Eviction_mr_current\", \"Other\". For status part, if no eviction in the history and in "
    "the future: \"absent\"; if eviction is completed: \"present\"; if eviction noticed but not "
    "completed: \"pending\"; if eviction might be happened in the future: \"hypothetical\"; if "
    "mutual rescission: \"mr\". For timeframe part when \"present\" or \"mr\" status, if it is "
    "happened within this natural year: \"current\". If not shown specific time or noticed a time "
    "before this natural year: \"history\".";

constexpr std::string_view kNonEvictionInstruction =
    "Choose the most appropriate label from \"t1_Homelessness\", \"t1_InadequateHousing\", "
    "\"t1_LackOfAdequateFood\", \"t2_FinancialInsecurity\", \"t2_HousingInstability\", "
    "\"t2_MaterialHardship\", \"t2_TransportationInsecurity\", \"Other\".\n"
    "'t1_Homelessness': An individual or family who lacks a fixed, regular, and adequate nighttime "
    "residence, such as those living in emergency shelters, transitional housing, or places not "
    "meant for habitation.\n"
    "'t1_InadequateHousing': an occupied housing unit that has moderate or severe physical problems "
    "(e.g., deficiencies in plumbing, heating, electricity, hallways, and upkeep)\n"
    "'t1_LackOfAdequateFood': is the limited or inadequate access to food because of insufficient "
    "money and other resources for food.\n"
    "'t2_FinancialInsecurity': the anxiety produced by the possible exposure to adverse economic "
    "events and by the anticipation of the difficulty to recover from them. Examples could include a "
    "fear of unemployment, an expectation of a worsening financial situation, money mismanagement, "
    "or being financially exploited or a victim of financial scam.\n"
    "'t2_HousingInstability': having difficulty paying rent, spending more than 50% of household "
    "income on housing, having frequent moves, living in overcrowded conditions, or doubling up with "
    "friends and relatives.\n"
    "'t2_MaterialHardship': difficulty meeting basic needs such as food, housing or medical care, "
    "are common among low-income households.\n"
    "'t2_TransportationInsecurity': occurs when a person is regularly unable to get from place to "
    "place in a safe or timely manner because of a lack of resources. This can limit a person's "
    "access to work, school, medical care, social activities, and more.";

}  // namespace

std::string_view to_string(Step step) {
  switch (step) {
    case Step::Binary: return "binary";
    case Step::Eviction: return "eviction";
    case Step::NonEviction: return "non_eviction";
  }
  return "";
}

Step parse_step(std::string_view text) {
  if (text == "binary") return Step::Binary;
  if (text == "eviction") return Step::Eviction;
  if (text == "non_eviction" || text == "non-eviction") return Step::NonEviction;
  throw Error(ErrorCode::InvalidArgument, "unknown step '" + std::string(text) + "'");
}

const std::vector<std::string>& legal_tokens(Step step) {
  static const std::vector<std::string> binary = {"Yes", "No"};
  static const std::vector<std::string> eviction = tokens_for(kEvictionClasses);
  static const std::vector<std::string> non_eviction = tokens_for(kNonEvictionClasses);
  switch (step) {
    case Step::Binary: return binary;
    case Step::Eviction: return eviction;
    case Step::NonEviction: return non_eviction;
  }
  return binary;
}

bool is_legal(Step step, std::string_view token) {
  const auto& tokens = legal_tokens(step);
  return std::find(tokens.begin(), tokens.end(), token) != tokens.end();
}

void PromptProgram::validate(std::size_t max_demos) const {
  if (demos.size() > max_demos) {
    throw Error(ErrorCode::InvalidArgument, "program has " + std::to_string(demos.size()) +
                                                " demos, limit is " + std::to_string(max_demos));
  }
  for (const auto& demo : demos) {
    if (!is_legal(signature.step, demo.label)) {
      throw Error(ErrorCode::InvalidLabel, "demo label '" + demo.label + "' is not legal for step " +
                                               std::string(to_string(signature.step)));
    }
  }
}

nlohmann::json PromptProgram::to_json() const {
  nlohmann::json demo_rows = nlohmann::json::array();
  for (const auto& d : demos) {
    demo_rows.push_back({{"note", d.note},
                         {"rationale", d.rationale},
                         {"label", d.label},
                         {"origin", d.origin == DemoOrigin::Bootstrapped ? "bootstrapped" : "labeled"}});
  }
  return {{"instruction", instruction},
          {"demos", demo_rows},
          {"signature",
           {{"input", signature.input_field},
            {"output", signature.output_field},
            {"step", to_string(signature.step)}}},
          {"chain_of_thought", chain_of_thought},
          {"version", version}};
}

PromptProgram PromptProgram::from_json(const nlohmann::json& j) {
  PromptProgram p;
  p.instruction = j.at("instruction").get<std::string>();
  const auto& sig = j.at("signature");
  p.signature.input_field = sig.value("input", p.signature.input_field);
  p.signature.output_field = sig.value("output", p.signature.output_field);
  p.signature.step = parse_step(sig.at("step").get<std::string>());
  for (const auto& d : j.value("demos", nlohmann::json::array())) {
    p.demos.push_back({d.at("note").get<std::string>(), d.value("rationale", std::string{}),
                       d.at("label").get<std::string>(),
                       d.value("origin", std::string("labeled")) == "bootstrapped"
                           ? DemoOrigin::Bootstrapped
                           : DemoOrigin::Labeled});
  }
  p.chain_of_thought = j.value("chain_of_thought", true);
  p.version = j.value("version", std::uint64_t{0});
  p.validate();
  return p;
}

PromptProgram default_program(Step step) {
  PromptProgram p;
  p.signature.step = step;
  switch (step) {
    case Step::Binary: p.instruction = kBinaryInstruction; break;
    case Step::Eviction: p.instruction = kEvictionInstruction; break;
    case Step::NonEviction: p.instruction = kNonEvictionInstruction; break;
  }
  return p;
}

}  // namespace sdoh
