// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/quality_control.hpp"

namespace sdoh {
namespace {

PassRecord run_pass(const AnnotateStep& step, std::string_view note, std::size_t index) {
  PassRecord record;
  try {
    record.result = step(note, index);
  } catch (const Error& e) {
    record.error = e.what();
  }
  return record;
}

bool same_label(const PassRecord& a, const PassRecord& b) {
  return a.ok() && b.ok() && a.result->label == b.result->label;
}

}  // namespace

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::AcceptedAsRequired: return "AcceptedAsRequired";
    case Decision::AcceptedAsAnnotated: return "AcceptedAsAnnotated";
    case Decision::Discarded: return "Discarded";
  }
  return "";
}

Decision parse_decision(std::string_view text) {
  if (text == "AcceptedAsRequired") return Decision::AcceptedAsRequired;
  if (text == "AcceptedAsAnnotated") return Decision::AcceptedAsAnnotated;
  if (text == "Discarded") return Decision::Discarded;
  throw Error(ErrorCode::InvalidArgument, "unknown decision '" + std::string(text) + "'");
}

ValidationOutcome validate_example(std::string_view note, SdohLabel required_label,
                                   const AnnotateStep& annotate_step, NotePool& pool,
                                   const std::string& source_raw_note_id) {
  if (required_label == SdohLabel::Other) {
    throw Error(ErrorCode::InvalidLabel, "'Other' cannot be a required label");
  }
  ValidationOutcome outcome;
  outcome.passes.push_back(run_pass(annotate_step, note, 0));
  const auto& first = outcome.passes.front();
  if (first.ok() && first.result->label == canonical_name(required_label)) {
    outcome.decision = Decision::AcceptedAsRequired;
    outcome.final_label = required_label;
    return outcome;
  }

  outcome.passes.push_back(run_pass(annotate_step, note, 1));
  outcome.passes.push_back(run_pass(annotate_step, note, 2));
  const auto& p = outcome.passes;
  if (same_label(p[0], p[1]) && same_label(p[1], p[2])) {
    outcome.decision = Decision::AcceptedAsAnnotated;
    outcome.final_label = parse_label(p[0].result->label);
    return outcome;
  }
  outcome.decision = Decision::Discarded;
  pool.return_note(source_raw_note_id);
  return outcome;
}

AnnotateStep make_step_annotator(const ProgramSet& programs, SdohLabel required_label,
                                 Gateway& gateway, const AnnotateOptions& options) {
  const Step step = is_eviction_related(required_label) ? Step::Eviction : Step::NonEviction;
  const PromptProgram& program = programs.for_step(step);
  return [&program, &gateway, options](std::string_view note, std::size_t pass_index) {
    AnnotateOptions opts = options;
    if (pass_index > 0) {
      opts.seed = options.seed.value_or(0) + static_cast<std::int64_t>(pass_index);
    }
    return annotate(program, note, gateway, opts);
  };
}

}  // namespace sdoh
