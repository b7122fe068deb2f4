// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/optimizer.hpp"

#include <algorithm>
#include <set>

#include "sdoh/util.hpp"

namespace sdoh {

int exact_match(std::string_view predicted, std::string_view gold) {
  return predicted == gold ? 1 : 0;
}

std::vector<Demo> bootstrap_demos(const PromptProgram& teacher,
                                  const std::vector<LabeledExample>& trainset, Gateway& gateway,
                                  const AnnotateOptions& options) {
  std::vector<std::optional<Demo>> kept(trainset.size());
  parallel_for(trainset.size(), gateway.options().max_in_flight, [&](std::size_t i) {
    const auto& ex = trainset[i];
    try {
      auto result = annotate(teacher, ex.note, gateway, options);
      if (exact_match(result.label, ex.gold_label) == 1) {
        kept[i] = Demo{ex.note, result.rationale, result.label, DemoOrigin::Bootstrapped};
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnparseableOutput) throw;
    }
  });
  std::vector<Demo> demos;
  for (auto& d : kept) {
    if (d) demos.push_back(std::move(*d));
  }
  return demos;
}

double evaluate_program(const PromptProgram& program, const std::vector<LabeledExample>& dataset,
                        Gateway& gateway, const AnnotateOptions& options) {
  if (dataset.empty()) throw Error(ErrorCode::InvalidArgument, "evaluation dataset is empty");
  std::vector<int> hits(dataset.size(), 0);
  parallel_for(dataset.size(), gateway.options().max_in_flight, [&](std::size_t i) {
    try {
      hits[i] = exact_match(annotate(program, dataset[i].note, gateway, options).label,
                            dataset[i].gold_label);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnparseableOutput) throw;
      hits[i] = 0;
    }
  });
  std::size_t total = 0;
  for (int h : hits) total += static_cast<std::size_t>(h);
  return static_cast<double>(total) / static_cast<double>(dataset.size());
}

nlohmann::json OptimizeResult::to_json(const OptimizerConfig& config) const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& c : score_table) {
    nlohmann::json notes = nlohmann::json::array();
    for (const auto& d : c.demos) notes.push_back(sha256_hex(d.note).substr(0, 12));
    table.push_back({{"index", c.index}, {"kind", c.kind}, {"demo_digests", notes}, {"score", c.score}});
  }
  return {{"format", "sdoh.program.v1"},
          {"program", best.to_json()},
          {"best_index", best_index},
          {"config",
           {{"num_candidates", config.num_candidates},
            {"max_demos", config.max_demos},
            {"seed", config.seed}}},
          {"score_table", table}};
}

OptimizeResult optimize(const PromptProgram& base, const std::vector<LabeledExample>& trainset,
                        const std::vector<LabeledExample>& devset, const OptimizerConfig& config,
                        Gateway& gateway, const AnnotateOptions& options) {
  if (devset.empty()) throw Error(ErrorCode::InvalidArgument, "devset is empty");
  if (config.num_candidates == 0) {
    throw Error(ErrorCode::InvalidArgument, "num_candidates must be at least 1");
  }
  for (const auto& ex : trainset) {
    if (!is_legal(base.signature.step, ex.gold_label)) {
      throw Error(ErrorCode::InvalidLabel, "train label '" + ex.gold_label + "' is not legal here");
    }
  }

  OptimizeResult result;
  PromptProgram teacher = base;
  teacher.demos.clear();
  result.bootstrapped = trainset.empty() ? std::vector<Demo>{}
                                         : bootstrap_demos(teacher, trainset, gateway, options);

  // Random-search pool: bootstrapped demos first, then raw labeled examples
  // whose notes were not bootstrapped.
  std::vector<Demo> pool = result.bootstrapped;
  std::set<std::string> seen;
  for (const auto& d : pool) seen.insert(d.note);
  for (const auto& ex : trainset) {
    if (seen.insert(ex.note).second) {
      pool.push_back({ex.note, ex.gold_rationale.value_or(""), ex.gold_label, DemoOrigin::Labeled});
    }
  }
  if (pool.empty() && config.num_candidates > 1) {
    throw Error(ErrorCode::EmptyCandidatePool, "no bootstrapped demos and no train examples");
  }

  std::vector<CandidateScore> candidates;
  candidates.push_back({0, "zero_shot", {}, 0.0});
  if (candidates.size() < config.num_candidates && !result.bootstrapped.empty()) {
    const auto n = std::min(config.max_demos, result.bootstrapped.size());
    candidates.push_back({1, "bootstrapped",
                          {result.bootstrapped.begin(), result.bootstrapped.begin() + n}, 0.0});
  }
  SeededRng rng(config.seed);
  while (candidates.size() < config.num_candidates) {
    std::vector<Demo> shuffled = pool;
    rng.shuffle(shuffled);
    const auto limit = std::min(config.max_demos, shuffled.size());
    const auto size = limit == 0 ? 0 : 1 + rng.below(limit);
    shuffled.resize(size);
    candidates.push_back({candidates.size(), "random", std::move(shuffled), 0.0});
  }

  // Candidates run one after another; examples within a candidate fan out
  // through the gateway. Aggregation is by candidate index.
  for (auto& c : candidates) {
    PromptProgram program = base;
    program.demos = c.demos;
    c.score = evaluate_program(program, devset, gateway, options);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].score > candidates[best].score) best = i;
  }
  result.best_index = best;
  result.best = base;
  result.best.demos = candidates[best].demos;
  result.best.version = base.version + 1;
  result.score_table = std::move(candidates);
  return result;
}

std::vector<LabeledExample> load_labeled_examples(const std::filesystem::path& path) {
  std::vector<LabeledExample> out;
  for (const auto& row : read_ndjson(path)) {
    LabeledExample ex;
    ex.note = row.at("text").get<std::string>();
    ex.gold_label = row.at("label").get<std::string>();
    if (row.contains("rationale") && row["rationale"].is_string()) {
      ex.gold_rationale = row["rationale"].get<std::string>();
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace sdoh
