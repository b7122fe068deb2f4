// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sdoh {

/// Cascade step an annotator program serves.
enum class Step { Binary, Eviction, NonEviction };

std::string_view to_string(Step step);
Step parse_step(std::string_view text);

/// Tokens a step may emit: Yes/No for Binary; the seven tier-3 classes plus
/// "Other" for Eviction; the seven tier-1/2 classes plus "Other" otherwise.
const std::vector<std::string>& legal_tokens(Step step);
bool is_legal(Step step, std::string_view token);

enum class DemoOrigin { Bootstrapped, Labeled };

/// Worked (note, rationale, label) example embedded in a program.
struct Demo {
  std::string note;
  std::string rationale;  // empty for raw labeled train examples
  std::string label;
  DemoOrigin origin = DemoOrigin::Labeled;

  bool operator==(const Demo&) const = default;
};

struct Signature {
  std::string input_field = "Patient Social History Note";
  std::string output_field = "SDoH Annotation";
  Step step = Step::Binary;

  bool operator==(const Signature&) const = default;
};

struct PromptProgram {
  std::string instruction;
  std::vector<Demo> demos;
  Signature signature;
  bool chain_of_thought = true;
  std::uint64_t version = 0;

  /// Throws InvalidArgument when a demo label is illegal for the signature or
  /// there are more than `max_demos` demos.
  void validate(std::size_t max_demos = 64) const;
  nlohmann::json to_json() const;
  static PromptProgram from_json(const nlohmann::json& j);

  bool operator==(const PromptProgram&) const = default;
};

/// Zero-demo chain-of-thought program carrying the stock instruction for
/// `step`.
PromptProgram default_program(Step step);

}  // namespace sdoh
