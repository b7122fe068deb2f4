// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdoh/annotator.hpp"
#include "sdoh/gateway.hpp"
#include "sdoh/program.hpp"

namespace sdoh {

struct LabeledExample {
  std::string note;
  std::string gold_label;
  std::optional<std::string> gold_rationale;
};

/// 1 iff the two label tokens are identical.
int exact_match(std::string_view predicted, std::string_view gold);

/// Runs `teacher` over `trainset` and keeps (note, emitted rationale, label)
/// for every example it labels correctly. Unparseable outputs are skipped.
std::vector<Demo> bootstrap_demos(const PromptProgram& teacher,
                                  const std::vector<LabeledExample>& trainset, Gateway& gateway,
                                  const AnnotateOptions& options = {});

/// Mean exact match of `program` over `dataset`; unparseable outputs score 0.
double evaluate_program(const PromptProgram& program, const std::vector<LabeledExample>& dataset,
                        Gateway& gateway, const AnnotateOptions& options = {});

struct OptimizerConfig {
  std::size_t num_candidates = 16;
  std::size_t max_demos = 8;
  std::uint64_t seed = 0;
  std::size_t max_parallel = 4;
};

struct CandidateScore {
  std::size_t index = 0;
  std::string kind;  // "zero_shot", "bootstrapped", "random"
  std::vector<Demo> demos;
  double score = 0.0;
};

struct OptimizeResult {
  PromptProgram best;
  std::size_t best_index = 0;
  std::vector<CandidateScore> score_table;
  std::vector<Demo> bootstrapped;

  /// Versioned program file: program, config, seed and score table.
  nlohmann::json to_json(const OptimizerConfig& config) const;
};

/// Bootstrap-few-shot with random search over demo subsets.
///
/// Candidate 0 is the zero-demo base program. Candidate 1 (when the
/// bootstrapped pool is non-empty) takes the first `max_demos` bootstrapped
/// demos in train order. Every later candidate shuffles the pool of
/// bootstrapped demos plus raw labeled train examples with the seeded
/// generator and keeps a prefix of size uniform in [1, max_demos]. Each
/// candidate is scored by mean exact match on `devset`; the highest score
/// wins, ties going to the lowest index.
OptimizeResult optimize(const PromptProgram& base, const std::vector<LabeledExample>& trainset,
                        const std::vector<LabeledExample>& devset, const OptimizerConfig& config,
                        Gateway& gateway, const AnnotateOptions& options = {});

std::vector<LabeledExample> load_labeled_examples(const std::filesystem::path& path);

}  // namespace sdoh
