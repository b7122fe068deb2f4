// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "sdoh/dataset.hpp"
#include "sdoh/error.hpp"
#include "published_plan.hpp"
#include "test_support.hpp"

using namespace sdoh;

using testing::kPublishedPlan;

namespace {

Record rec(const std::string& text, RecordSource src, std::optional<std::string> rationale = "because") {
  Record r;
  r.id = make_record_id(text);
  r.text = text;
  r.label = SdohLabel::EvictionPending;
  r.rationale = std::move(rationale);
  r.source = src;
  return r;
}

std::vector<Record> pool_of(const std::string& prefix, std::size_t n, RecordSource src) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rec(prefix + std::to_string(i), src));
  return out;
}

}  // namespace

TEST_CASE("default plan reproduces the published split table") {
  const auto plan = build_split_plan();
  std::int64_t cells = 0;
  for (const auto& row : kPublishedPlan) {
    const auto l = parse_label(row.label);
    CAPTURE(row.label);
    CHECK(plan.get(l, Split::DspyTrain, RecordSource::Synth) == row.train);
    CHECK(plan.get(l, Split::DspyEval, RecordSource::Synth) == row.eval);
    CHECK(plan.get(l, Split::Sft, RecordSource::Synth) == row.sft);
    CHECK(plan.get(l, Split::Test, RecordSource::Synth) == row.t_synth);
    CHECK(plan.get(l, Split::Test, RecordSource::Mimic) == row.t_mimic);
    CHECK(plan.get(l, Split::Test, RecordSource::Pmc) == row.t_pmc);
    cells += row.train + row.eval + row.sft + row.t_synth + row.t_mimic + row.t_pmc;
  }
  std::int64_t plan_sum = 0;
  for (const auto& [k, n] : plan.counts()) plan_sum += n;
  CHECK(plan_sum == cells);

  CHECK(plan.total(Split::DspyTrain, true) == 56);
  CHECK(plan.total(Split::DspyEval, true) == 84);
  CHECK(plan.total(Split::Sft, true) == 5000);
  CHECK(plan.total(Split::Test, true) == 308);
  CHECK(plan.total(Split::Sft, false) == 3000);
  CHECK(plan.total(Split::Test, false) == 308);
}

TEST_CASE("larger dev-set preset and overrides") {
  const auto plan = build_split_plan({{SdohLabel::EvictionPending, Split::Sft, RecordSource::Synth, 10}},
                                     DevsetPreset::PerLabel48);
  CHECK(plan.get(SdohLabel::Homelessness, Split::DspyEval, RecordSource::Synth) == 20);
  CHECK(plan.get(SdohLabel::Homelessness, Split::DspyEval, RecordSource::Mimic) == 20);
  CHECK(plan.get(SdohLabel::Homelessness, Split::DspyEval, RecordSource::Pmc) == 8);
  CHECK(plan.get(SdohLabel::EvictionPending, Split::Sft, RecordSource::Synth) == 10);
  CHECK(plan.digest() != build_split_plan().digest());
  CHECK_THROWS_AS(build_split_plan({{SdohLabel::EvictionPending, Split::Sft, RecordSource::Synth, -1}}), Error);
}

TEST_CASE("scaled SFT counts sum exactly and keep proportions") {
  for (std::int64_t total : {0, 1, 7, 100, 999, 5000}) {
    for (bool ev : {true, false}) {
      const auto c = scaled_sft_counts(total, ev);
      std::int64_t sum = 0;
      for (const auto& [l, n] : c) sum += n;
      CHECK(sum == total);
    }
  }
  const auto full = scaled_sft_counts(5000, true);
  CHECK(full.at(SdohLabel::EvictionAbsent) == 500);
  CHECK(full.at(SdohLabel::EvictionPending) == 750);
  const auto half = scaled_sft_counts(1500, false);
  CHECK(half.at(SdohLabel::TransportationInsecurity) == 150);
  CHECK(half.at(SdohLabel::Homelessness) == 225);
  CHECK_THROWS_AS(scaled_sft_counts(-1, true), Error);
}

TEST_CASE("mixing draws the requested composition") {
  const auto synth = pool_of("s", 1500, RecordSource::Synth);
  const auto real = pool_of("m", 500, RecordSource::Mimic);
  const auto mixed = mix_composition(synth, real, 0.3, 1000, 42);
  REQUIRE(mixed.size() == 1000);
  std::size_t n_real = 0;
  std::set<std::string> ids;
  for (const auto& r : mixed) {
    n_real += r.source == RecordSource::Mimic;
    ids.insert(r.id);
  }
  CHECK(n_real == 300);
  CHECK(ids.size() == 1000);  // no record drawn twice
  CHECK(mix_composition(synth, real, 0.3, 1000, 42) == mixed);
  CHECK(mix_composition(synth, real, 0.3, 1000, 43) != mixed);

  CHECK(mix_composition(synth, real, 0.0, 10, 1).size() == 10);
  CHECK(mix_composition(synth, real, 0.25, 10, 1).size() == 10);  // ceil(2.5) = 3 real
  std::size_t r3 = 0;
  for (const auto& r : mix_composition(synth, real, 0.25, 10, 1)) r3 += r.source == RecordSource::Mimic;
  CHECK(r3 == 3);
  try {
    mix_composition(synth, real, 1.0, 600, 1);
    FAIL("expected InsufficientRealRecords");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientRealRecords);
  }
}

TEST_CASE("reasoning and label-only exports carry the same rows") {
  const std::vector<Record> recs = {rec("a", RecordSource::Synth, "r1"), rec("b", RecordSource::Synth, "r2")};
  const auto with = export_sft(recs, true);
  const auto without = export_sft(recs, false);
  REQUIRE(with.size() == without.size());
  for (std::size_t i = 0; i < with.size(); ++i) {
    CHECK(with[i]["id"] == without[i]["id"]);
    CHECK(with[i]["label"] == without[i]["label"]);
    CHECK(with[i]["messages"][0] == without[i]["messages"][0]);
    CHECK(with[i]["messages"][1] == without[i]["messages"][1]);
    CHECK(without[i]["messages"][2]["content"] == "t3_Eviction_pending");
  }
  CHECK(with[0]["messages"][2]["content"] == "Reasoning: r1\nLabel: t3_Eviction_pending");

  const std::vector<Record> missing = {rec("c", RecordSource::Synth, std::nullopt)};
  CHECK(export_sft(missing, false).size() == 1);
  try {
    export_sft(missing, true);
    FAIL("expected MissingRationale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingRationale);
  }
}

TEST_CASE("records round trip and ids are content hashes") {
  testing::TempDir dir;
  auto r = rec("some text", RecordSource::Pmc);
  r.split = Split::Test;
  r.provenance = Provenance::AcceptedAsAnnotated;
  save_records(dir / "r.ndjson", {r, rec("other", RecordSource::Synth, std::nullopt)});
  const auto back = load_records(dir / "r.ndjson");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == r);
  CHECK(make_record_id("some text").size() == 16);
  CHECK(make_record_id("some text") == make_record_id("some text"));
  CHECK(make_record_id("some text") != make_record_id("some text."));
}

TEST_CASE("stats count unique records and compare to a plan") {
  auto a = rec("a", RecordSource::Synth);
  auto b = rec("b", RecordSource::Mimic);
  b.split = Split::Test;
  const auto t = stats({a, b, a});
  CHECK(t.unique_records == 2);
  CHECK(t.duplicate_ids == std::vector<std::string>{a.id});
  const auto plan = t.as_plan();
  CHECK(plan.get(SdohLabel::EvictionPending, Split::Sft, RecordSource::Synth) == 1);
  CHECK(plan.get(SdohLabel::EvictionPending, Split::Test, RecordSource::Mimic) == 1);
  CHECK(plan.get(SdohLabel::EvictionPending, Split::Test, RecordSource::Synth) == 0);
  CHECK_FALSE(t.render().empty());
}

TEST_CASE("manifest summarizes the export") {
  const std::vector<Record> recs = {rec("a", RecordSource::Synth), rec("b", RecordSource::Mimic),
                                    rec("c", RecordSource::Mimic)};
  const auto m = make_manifest(recs, true, 7, "abc");
  CHECK(m.count == 3);
  CHECK(m.composition.at("mimic") == 2);
  const auto j = m.to_json();
  CHECK(j["seed"] == 7);
  CHECK(j["plan_digest"] == "abc");
}
