// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdoh/annotator.hpp"
#include "sdoh/ingest.hpp"
#include "sdoh/taxonomy.hpp"

namespace sdoh {

enum class Decision { AcceptedAsRequired, AcceptedAsAnnotated, Discarded };

std::string_view to_string(Decision decision);
Decision parse_decision(std::string_view text);

/// One annotation pass. `result` is empty when the annotator failed.
struct PassRecord {
  std::optional<AnnotationResult> result;
  std::string error;

  bool ok() const { return result.has_value(); }
};

struct ValidationOutcome {
  Decision decision = Decision::Discarded;
  std::optional<SdohLabel> final_label;
  std::vector<PassRecord> passes;  // one or three
};

/// Annotates `note` for pass `pass_index` (0, 1, 2).
using AnnotateStep = std::function<AnnotationResult(std::string_view note, std::size_t pass_index)>;

/// Triple-pass consistency check for one augmented note.
///
/// Pass 0 matching `required_label` accepts the note as required. Otherwise
/// passes 1 and 2 run; three identical labels accept the note with that
/// label, anything else discards it and returns `source_raw_note_id` to
/// `pool`. A failed pass never matches anything, including another failure.
ValidationOutcome validate_example(std::string_view note, SdohLabel required_label,
                                   const AnnotateStep& annotate_step, NotePool& pool,
                                   const std::string& source_raw_note_id);

/// Step-2 or Step-3 annotator for `required_label`'s side of the cascade.
/// Passes 1 and 2 reuse the program and temperature with seeds
/// `base_seed + pass_index`.
AnnotateStep make_step_annotator(const ProgramSet& programs, SdohLabel required_label,
                                 Gateway& gateway, const AnnotateOptions& options = {});

}  // namespace sdoh
