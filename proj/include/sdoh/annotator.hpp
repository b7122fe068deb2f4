// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdoh/error.hpp"
#include "sdoh/gateway.hpp"
#include "sdoh/program.hpp"

namespace sdoh {

struct AnnotationResult {
  Step step = Step::Binary;
  std::string label;
  std::string rationale;
  std::string raw_output;
  std::size_t run_index = 0;
};

struct ParsedAnnotation {
  std::string label;
  std::string rationale;
};

/// Extracts a label and rationale from model output.
///
/// A `Label:` (or `Answer:`) line wins when it holds a legal token; the
/// rationale is then the `Reasoning:` field, or the text before the label
/// line. Otherwise the last legal token anywhere in the output is the label
/// and the whole output is the rationale. Tokens match case-sensitively on
/// word boundaries. Throws Error(UnparseableOutput) when no legal token
/// occurs.
ParsedAnnotation parse_annotation_output(std::string_view raw,
                                         const std::vector<std::string>& legal_labels);

struct AnnotateOptions {
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  std::size_t run_index = 0;
  int max_tokens = 512;
  std::string model_tag;
};

/// Chat messages for `program` applied to `note`: system instruction and
/// output format, one user/assistant pair per demo, then the note.
std::vector<ChatMessage> render_messages(const PromptProgram& program, std::string_view note);

/// Runs one step program. On unparseable output the model is reprompted once
/// with the legal label list before Error(UnparseableOutput) is raised.
AnnotationResult annotate(const PromptProgram& program, std::string_view note, Gateway& gateway,
                          const AnnotateOptions& options = {});

AnnotationResult annotate_binary(std::string_view note, const PromptProgram& program,
                                 Gateway& gateway, const AnnotateOptions& options = {});
AnnotationResult annotate_eviction(std::string_view note, const PromptProgram& program,
                                   Gateway& gateway, const AnnotateOptions& options = {});
AnnotationResult annotate_non_eviction(std::string_view note, const PromptProgram& program,
                                       Gateway& gateway, const AnnotateOptions& options = {});

struct ProgramSet {
  PromptProgram binary = default_program(Step::Binary);
  PromptProgram eviction = default_program(Step::Eviction);
  PromptProgram non_eviction = default_program(Step::NonEviction);

  const PromptProgram& for_step(Step step) const;
  std::string version_tag() const;
};

struct CascadeTrace {
  std::string note_id;
  std::optional<AnnotationResult> step1;
  std::optional<AnnotationResult> second;  // Step 2 when step1 == Yes, else Step 3
  std::string final_label;
  std::string program_version;

  nlohmann::json to_json() const;
};

/// Step failure inside a cascade; carries the trace built so far.
class CascadeError : public Error {
 public:
  CascadeError(const Error& cause, CascadeTrace partial)
      : Error(cause.code(), cause.what()), partial_(std::move(partial)) {}
  const CascadeTrace& partial() const { return partial_; }

 private:
  CascadeTrace partial_;
};

/// Step 1, then exactly one of Step 2 (Yes) or Step 3 (No).
CascadeTrace annotate_cascade(std::string_view note_id, std::string_view note,
                              const ProgramSet& programs, Gateway& gateway,
                              const AnnotateOptions& options = {});

}  // namespace sdoh
