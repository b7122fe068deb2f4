// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "sdoh/error.hpp"
#include "sdoh/util.hpp"

namespace sdoh {

std::string_view to_string(RecordSource v) {
  switch (v) {
    case RecordSource::Synth: return "synth";
    case RecordSource::Mimic: return "mimic";
    case RecordSource::Pmc: return "pmc";
  }
  return "";
}

std::string_view to_string(Split v) {
  switch (v) {
    case Split::DspyTrain: return "dspy_train";
    case Split::DspyEval: return "dspy_eval";
    case Split::Sft: return "sft";
    case Split::Test: return "test";
  }
  return "";
}

std::string_view to_string(Provenance v) {
  switch (v) {
    case Provenance::AcceptedAsRequired: return "AcceptedAsRequired";
    case Provenance::AcceptedAsAnnotated: return "AcceptedAsAnnotated";
    case Provenance::Human: return "human";
  }
  return "";
}

RecordSource parse_record_source(std::string_view text) {
  if (text == "synth") return RecordSource::Synth;
  if (text == "mimic") return RecordSource::Mimic;
  if (text == "pmc") return RecordSource::Pmc;
  throw Error(ErrorCode::InvalidArgument, "unknown record source '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "dspy_train") return Split::DspyTrain;
  if (text == "dspy_eval") return Split::DspyEval;
  if (text == "sft") return Split::Sft;
  if (text == "test") return Split::Test;
  throw Error(ErrorCode::InvalidArgument, "unknown split '" + std::string(text) + "'");
}

Provenance parse_provenance(std::string_view text) {
  if (text == "AcceptedAsRequired") return Provenance::AcceptedAsRequired;
  if (text == "AcceptedAsAnnotated") return Provenance::AcceptedAsAnnotated;
  if (text == "human") return Provenance::Human;
  throw Error(ErrorCode::InvalidArgument, "unknown provenance '" + std::string(text) + "'");
}

std::string make_record_id(std::string_view text) { return sha256_hex(text).substr(0, 16); }

nlohmann::json to_json(const Record& r) {
  return {{"id", r.id},
          {"text", r.text},
          {"label", canonical_name(r.label)},
          {"rationale", r.rationale ? nlohmann::json(*r.rationale) : nlohmann::json()},
          {"source", to_string(r.source)},
          {"split", to_string(r.split)},
          {"provenance", r.provenance ? nlohmann::json(to_string(*r.provenance)) : nlohmann::json()}};
}

Record record_from_json(const nlohmann::json& j) {
  Record r;
  r.text = j.at("text").get<std::string>();
  r.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : make_record_id(r.text);
  r.label = parse_label(j.at("label").get<std::string>());
  if (r.label == SdohLabel::Other) {
    throw Error(ErrorCode::InvalidLabel, "record '" + r.id + "' carries the 'Other' sentinel");
  }
  if (j.contains("rationale") && j["rationale"].is_string()) r.rationale = j["rationale"].get<std::string>();
  r.source = parse_record_source(j.value("source", std::string("synth")));
  r.split = parse_split(j.value("split", std::string("sft")));
  if (j.contains("provenance") && j["provenance"].is_string()) {
    r.provenance = parse_provenance(j["provenance"].get<std::string>());
  }
  return r;
}

std::vector<Record> load_records(const std::filesystem::path& path) {
  std::vector<Record> out;
  for (const auto& row : read_ndjson(path)) out.push_back(record_from_json(row));
  return out;
}

void save_records(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_ndjson(path, rows);
}

// ---------------------------------------------------------------------------

void SplitPlan::set(SdohLabel label, Split split, RecordSource source, std::int64_t count) {
  if (count < 0) {
    throw Error(ErrorCode::NegativeCount, "negative count for " + std::string(canonical_name(label)) +
                                              "/" + std::string(to_string(split)) + "/" +
                                              std::string(to_string(source)));
  }
  if (label == SdohLabel::Other) throw Error(ErrorCode::InvalidLabel, "plans cannot target 'Other'");
  if (count == 0) {
    counts_.erase({label, split, source});
  } else {
    counts_[{label, split, source}] = count;
  }
}

std::int64_t SplitPlan::get(SdohLabel label, Split split, RecordSource source) const {
  auto it = counts_.find({label, split, source});
  return it == counts_.end() ? 0 : it->second;
}

std::int64_t SplitPlan::total(Split split, bool eviction) const {
  std::int64_t sum = 0;
  for (const auto& [key, n] : counts_) {
    const auto& [label, s, src] = key;
    if (s == split && is_eviction_related(label) == eviction) sum += n;
  }
  return sum;
}

nlohmann::json SplitPlan::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, n] : counts_) {
    const auto& [label, split, source] = key;
    rows.push_back({{"label", canonical_name(label)},
                    {"split", to_string(split)},
                    {"source", to_string(source)},
                    {"count", n}});
  }
  return rows;
}

std::string SplitPlan::digest() const { return sha256_hex(to_json().dump()).substr(0, 16); }

namespace {

std::int64_t default_sft(SdohLabel label) {
  switch (label) {
    case SdohLabel::EvictionAbsent: return 500;
    case SdohLabel::TransportationInsecurity: return 300;
    default: return is_eviction_related(label) ? 750 : 450;
  }
}

bool synth_only_test(SdohLabel label) {
  return label == SdohLabel::EvictionAbsent || label == SdohLabel::Homelessness;
}

}  // namespace

SplitPlan build_split_plan(const std::vector<PlanOverride>& overrides, DevsetPreset devset) {
  SplitPlan plan;
  for (SdohLabel label : kAllClasses) {
    plan.set(label, Split::DspyTrain, RecordSource::Synth, 8);
    if (devset == DevsetPreset::PerLabel12) {
      plan.set(label, Split::DspyEval, RecordSource::Synth, 12);
    } else {
      plan.set(label, Split::DspyEval, RecordSource::Synth, 20);
      plan.set(label, Split::DspyEval, RecordSource::Mimic, 20);
      plan.set(label, Split::DspyEval, RecordSource::Pmc, 8);
    }
    plan.set(label, Split::Sft, RecordSource::Synth, default_sft(label));
    plan.set(label, Split::Test, RecordSource::Synth, 20);
    if (!synth_only_test(label)) {
      plan.set(label, Split::Test, RecordSource::Mimic, 20);
      plan.set(label, Split::Test, RecordSource::Pmc, 8);
    }
  }
  for (const auto& o : overrides) plan.set(o.label, o.split, o.source, o.count);
  return plan;
}

std::map<SdohLabel, std::int64_t> scaled_sft_counts(std::int64_t total, bool eviction) {
  if (total < 0) throw Error(ErrorCode::NegativeCount, "negative training-size total");
  const auto& labels = eviction ? kEvictionClasses : kNonEvictionClasses;
  std::int64_t base_total = 0;
  for (SdohLabel l : labels) base_total += default_sft(l);

  std::map<SdohLabel, std::int64_t> out;
  std::vector<std::pair<std::int64_t, std::size_t>> remainders;  // (remainder, index)
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::int64_t scaled = default_sft(labels[i]) * total;
    out[labels[i]] = scaled / base_total;
    assigned += scaled / base_total;
    remainders.emplace_back(scaled % base_total, i);
  }
  // Largest remainder first; ties go to the earlier class.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++out[labels[remainders[k % remainders.size()].second]];
  }
  return out;
}

std::vector<Record> mix_composition(const std::vector<Record>& synth,
                                    const std::vector<Record>& real, double real_fraction,
                                    std::size_t target, std::uint64_t seed) {
  if (!(real_fraction >= 0.0 && real_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "real_fraction must lie in [0, 1]");
  }
  // The epsilon keeps products like 0.3 * 1000 from rounding up past 300.
  const auto real_count = static_cast<std::size_t>(
      std::ceil(real_fraction * static_cast<double>(target) - 1e-9));
  const std::size_t synth_count = target - real_count;
  if (real_count > real.size()) {
    throw Error(ErrorCode::InsufficientRealRecords,
                "need " + std::to_string(real_count) + " real records, have " +
                    std::to_string(real.size()));
  }
  if (synth_count > synth.size()) {
    throw Error(ErrorCode::InvalidArgument, "need " + std::to_string(synth_count) +
                                                " synthetic records, have " +
                                                std::to_string(synth.size()));
  }
  std::set<std::string> synth_ids;
  for (const auto& r : synth) synth_ids.insert(r.id);
  for (const auto& r : real) {
    if (synth_ids.count(r.id)) {
      throw Error(ErrorCode::InvalidArgument, "record '" + r.id + "' is in both pools");
    }
  }

  SeededRng rng(seed);
  auto sample = [&rng](const std::vector<Record>& pool, std::size_t n) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    }
    std::vector<Record> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(pool[idx[i]]);
    return out;
  };
  auto mixed = sample(synth, synth_count);
  auto reals = sample(real, real_count);
  mixed.insert(mixed.end(), reals.begin(), reals.end());
  return mixed;
}

std::vector<nlohmann::json> export_sft(const std::vector<Record>& records, bool with_reasoning) {
  if (with_reasoning) {
    for (const auto& r : records) {
      if (!r.rationale || r.rationale->empty()) {
        throw Error(ErrorCode::MissingRationale, "record '" + r.id + "' has no rationale");
      }
    }
  }
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    const std::string label(canonical_name(r.label));
    const std::string answer = with_reasoning ? "Reasoning: " + *r.rationale + "\nLabel: " + label : label;
    rows.push_back({{"id", r.id},
                    {"label", label},
                    {"messages",
                     {{{"role", "system"}, {"content", kSftSystemPrompt}},
                      {{"role", "user"}, {"content", r.text}},
                      {{"role", "assistant"}, {"content", answer}}}}});
  }
  return rows;
}

nlohmann::json ExportManifest::to_json() const {
  return {{"count", count},
          {"with_reasoning", with_reasoning},
          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json()},
          {"composition", composition},
          {"plan_digest", plan_digest}};
}

ExportManifest make_manifest(const std::vector<Record>& records, bool with_reasoning,
                             std::optional<std::uint64_t> seed, std::string plan_digest) {
  ExportManifest m;
  m.count = records.size();
  m.with_reasoning = with_reasoning;
  m.seed = seed;
  m.plan_digest = std::move(plan_digest);
  for (const auto& r : records) ++m.composition[std::string(to_string(r.source))];
  return m;
}

SplitPlan StatsTable::as_plan() const {
  SplitPlan plan;
  for (const auto& [key, n] : counts) {
    const auto& [label, split, source] = key;
    plan.set(label, split, source, n);
  }
  return plan;
}

StatsTable stats(const std::vector<Record>& records) {
  StatsTable table;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) {
      table.duplicate_ids.push_back(r.id);
      continue;
    }
    ++table.counts[{r.label, r.split, r.source}];
  }
  table.unique_records = seen.size();
  return table;
}

namespace {

std::string render_counts(const std::map<PlanKey, std::int64_t>& counts) {
  constexpr std::array<Split, 4> kSplits = {Split::DspyTrain, Split::DspyEval, Split::Sft, Split::Test};
  constexpr std::array<RecordSource, 3> kSources = {RecordSource::Synth, RecordSource::Mimic,
                                                    RecordSource::Pmc};
  auto get = [&](SdohLabel l, Split s, RecordSource src) -> std::int64_t {
    auto it = counts.find({l, s, src});
    return it == counts.end() ? 0 : it->second;
  };
  std::ostringstream out;
  out << std::left << std::setw(30) << "Label";
  for (Split s : kSplits) out << std::right << std::setw(16) << to_string(s);
  out << "   test(synth/mimic/pmc)\n";
  auto row = [&](std::string_view name, auto&& labels) {
    std::array<std::int64_t, 4> split_tot{};
    std::array<std::int64_t, 3> test_tot{};
    for (SdohLabel l : labels) {
      out << std::left << std::setw(30) << short_name(l);
      for (std::size_t i = 0; i < kSplits.size(); ++i) {
        std::int64_t n = 0;
        for (auto src : kSources) n += get(l, kSplits[i], src);
        split_tot[i] += n;
        out << std::right << std::setw(16) << n;
      }
      out << "   ";
      for (std::size_t k = 0; k < kSources.size(); ++k) {
        const auto n = get(l, Split::Test, kSources[k]);
        test_tot[k] += n;
        out << (k ? "/" : "") << n;
      }
      out << '\n';
    }
    out << std::left << std::setw(30) << name;
    for (auto n : split_tot) out << std::right << std::setw(16) << n;
    out << "   " << test_tot[0] << '/' << test_tot[1] << '/' << test_tot[2] << "\n\n";
  };
  row("Eviction_total", kEvictionClasses);
  row("Non-Eviction_total", kNonEvictionClasses);
  return out.str();
}

}  // namespace

std::string StatsTable::render() const {
  std::string out = render_counts(counts);
  out += "unique records: " + std::to_string(unique_records) + "\n";
  if (!duplicate_ids.empty()) out += "duplicate ids: " + std::to_string(duplicate_ids.size()) + "\n";
  return out;
}

std::string render_plan(const SplitPlan& plan) { return render_counts(plan.counts()); }

}  // namespace sdoh
