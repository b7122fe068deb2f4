// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "sdoh/taxonomy.hpp"

namespace sdoh {

enum class RecordSource { Synth, Mimic, Pmc };
enum class Split { DspyTrain, DspyEval, Sft, Test };
enum class Provenance { AcceptedAsRequired, AcceptedAsAnnotated, Human };

std::string_view to_string(RecordSource v);
std::string_view to_string(Split v);
std::string_view to_string(Provenance v);
RecordSource parse_record_source(std::string_view text);
Split parse_split(std::string_view text);
Provenance parse_provenance(std::string_view text);

struct Record {
  std::string id;
  std::string text;
  SdohLabel label = SdohLabel::EvictionAbsent;
  std::optional<std::string> rationale;
  RecordSource source = RecordSource::Synth;
  Split split = Split::Sft;
  std::optional<Provenance> provenance;

  bool operator==(const Record&) const = default;
};

/// Content-addressed id: first 16 hex digits of SHA-256(text).
std::string make_record_id(std::string_view text);

nlohmann::json to_json(const Record& r);
Record record_from_json(const nlohmann::json& j);
std::vector<Record> load_records(const std::filesystem::path& path);
void save_records(const std::filesystem::path& path, const std::vector<Record>& records);

using PlanKey = std::tuple<SdohLabel, Split, RecordSource>;

class SplitPlan {
 public:
  void set(SdohLabel label, Split split, RecordSource source, std::int64_t count);
  std::int64_t get(SdohLabel label, Split split, RecordSource source) const;
  std::int64_t total(Split split, bool eviction) const;
  const std::map<PlanKey, std::int64_t>& counts() const { return counts_; }

  nlohmann::json to_json() const;
  std::string digest() const;

 private:
  std::map<PlanKey, std::int64_t> counts_;
};

enum class DevsetPreset { PerLabel12, PerLabel48 };

struct PlanOverride {
  SdohLabel label;
  Split split;
  RecordSource source;
  std::int64_t count;
};

/// Default plan: 8 synth DSPy-train per label; 12 synth DSPy-eval per label
/// (or 48 split 20/20/8 across synth/mimic/pmc with PerLabel48); test rows
/// 20/20/8 except Eviction_absent and Homelessness at 20 synth only; SFT
/// rows summing to 5000 eviction and 3000 non-eviction. Overrides apply last
/// and throw NegativeCount on negative counts.
SplitPlan build_split_plan(const std::vector<PlanOverride>& overrides = {},
                           DevsetPreset devset = DevsetPreset::PerLabel12);

/// SFT rows for a training-size experiment: the default per-class SFT
/// proportions scaled to `total` for one side of the cascade, rounded by
/// largest remainder so the rows sum to `total` exactly.
std::map<SdohLabel, std::int64_t> scaled_sft_counts(std::int64_t total, bool eviction);

/// Seeded sample of `target` records with ceil(real_fraction * target) real
/// records and the rest synthetic, both without replacement. Throws
/// InsufficientRealRecords when the real pool is too small.
std::vector<Record> mix_composition(const std::vector<Record>& synth,
                                    const std::vector<Record>& real, double real_fraction,
                                    std::size_t target, std::uint64_t seed);

inline constexpr std::string_view kSftSystemPrompt =
    "You are a healthcare annotator. Read the patient's social history note and identify "
    "eviction-related and other housing or economic social determinants of health. Answer with "
    "the single most appropriate label.";

/// Chat-format SFT rows `{"id", "label", "messages": [system, user,
/// assistant]}`. With reasoning the assistant turn is
/// "Reasoning: <rationale>\nLabel: <label>", otherwise the bare label.
/// Throws MissingRationale when reasoning is requested and a record has none.
std::vector<nlohmann::json> export_sft(const std::vector<Record>& records, bool with_reasoning);

struct ExportManifest {
  std::size_t count = 0;
  bool with_reasoning = false;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::size_t> composition;  // by source
  std::string plan_digest;

  nlohmann::json to_json() const;
};

ExportManifest make_manifest(const std::vector<Record>& records, bool with_reasoning,
                             std::optional<std::uint64_t> seed, std::string plan_digest);

struct StatsTable {
  std::map<PlanKey, std::int64_t> counts;
  std::vector<std::string> duplicate_ids;
  std::size_t unique_records = 0;

  /// Same shape as a plan so the two compare directly.
  SplitPlan as_plan() const;
  std::string render() const;
};

/// Counts records by (label, split, source); repeated ids count once and are
/// listed in `duplicate_ids`.
StatsTable stats(const std::vector<Record>& records);

std::string render_plan(const SplitPlan& plan);

}  // namespace sdoh
