// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "sdoh/augmenter.hpp"
#include "test_support.hpp"

using namespace sdoh;

namespace {

/// Verdicts that pass the first `round(acc * size)` items of each round.
VerdictSource accuracy_script(std::vector<double> per_round) {
  auto round = std::make_shared<std::size_t>(0);
  return [per_round, round](AugmentationSession& s) {
    const auto& batch = s.batch();
    const double acc = per_round.at(std::min(*round, per_round.size() - 1));
    ++*round;
    const auto pass_n = static_cast<std::size_t>(acc * static_cast<double>(batch.items.size()) + 0.5);
    std::vector<std::string> ids;
    for (const auto& it : batch.items) ids.push_back(it.item_id);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i < pass_n) {
        s.record_verdict(ids[i], true);
      } else {
        s.record_verdict(ids[i], false, "too generic");
      }
    }
  };
}

AugmenterConfig big_batches() {
  AugmenterConfig c;
  c.batch_size = 100;
  return c;
}

}  // namespace

TEST_CASE("state machine follows the per-round accuracy sequence") {
  auto backend = testing::augment_backend();
  auto gw = testing::scripted_gateway(backend);
  const auto& tax = Taxonomy::builtin();

  SUBCASE("first round clears the threshold") {
    NotePool pool(testing::make_notes(400));
    auto r = run_until_threshold(SdohLabel::EvictionPending, pool, gw, tax, accuracy_script({0.95}), big_batches());
    CHECK(r.state.history.size() == 1);
    CHECK(r.optimize_calls == 0);
    CHECK(r.accepted.size() == 95);
    CHECK(r.state.current_prompt == kAugmentPromptTemplate);
  }
  SUBCASE("second round clears the threshold after one revision") {
    NotePool pool(testing::make_notes(400));
    auto r = run_until_threshold(SdohLabel::EvictionPending, pool, gw, tax, accuracy_script({0.80, 0.92}),
                                 big_batches());
    CHECK(r.state.history.size() == 2);
    CHECK(r.optimize_calls == 1);
    CHECK(r.accepted.size() == 80 + 92);
    CHECK(r.state.history[0].accuracy == doctest::Approx(0.80));
    CHECK(r.state.history[1].accuracy == doctest::Approx(0.92));
    CHECK(r.state.current_prompt.rfind("Revision 1.", 0) == 0);
  }
  SUBCASE("three low rounds exhaust the budget") {
    NotePool pool(testing::make_notes(400));
    try {
      run_until_threshold(SdohLabel::EvictionPending, pool, gw, tax, accuracy_script({0.5, 0.5, 0.5}),
                          big_batches());
      FAIL("expected ThresholdNotReached");
    } catch (const ThresholdNotReachedError& e) {
      CHECK(e.code() == ErrorCode::ThresholdNotReached);
      CHECK(e.result().state.history.size() == 3);
      CHECK(e.result().optimize_calls == 2);
      CHECK(e.result().accepted.size() == 150);
    }
  }
  SUBCASE("exactly at threshold succeeds") {
    NotePool pool(testing::make_notes(400));
    auto r = run_until_threshold(SdohLabel::EvictionPending, pool, gw, tax, accuracy_script({0.90}), big_batches());
    CHECK(r.state.history.size() == 1);
  }
}

TEST_CASE("accepted set only grows and raw notes follow their verdicts") {
  auto gw = testing::scripted_gateway(testing::augment_backend());
  NotePool pool(testing::make_notes(60));
  AugmenterConfig cfg;
  cfg.batch_size = 20;
  AugmentationSession s(SdohLabel::EvictionAbsent, pool, gw, Taxonomy::builtin(), cfg);
  s.start();
  auto script = accuracy_script({0.5, 0.6, 0.7});
  std::set<std::string> seen;
  std::size_t prev = 0;
  while (s.status() == SessionStatus::Running) {
    script(s);
    s.advance();
    CHECK(s.accepted().size() >= prev);
    for (std::size_t i = 0; i < prev; ++i) CHECK(seen.count(s.accepted()[i].item_id) == 1);
    for (const auto& a : s.accepted()) seen.insert(a.item_id);
    prev = s.accepted().size();
    // Accepted notes stay reserved; nothing else does between rounds.
    const auto in_use_expected = s.accepted().size() + (s.status() == SessionStatus::Running ? cfg.batch_size : 0);
    CHECK(pool.count(NoteState::InUse) == in_use_expected);
  }
  CHECK(s.status() == SessionStatus::ThresholdNotReached);
  CHECK(s.accepted().size() == 10 + 12 + 14);
  CHECK(pool.count(NoteState::Available) == 60 - 36);
}

TEST_CASE("batch and item ids follow the label and round") {
  auto gw = testing::scripted_gateway(testing::augment_backend());
  NotePool pool(testing::make_notes(5));
  AugmenterConfig cfg;
  cfg.batch_size = 3;
  AugmentationSession s(SdohLabel::EvictionPresentCurrent, pool, gw, Taxonomy::builtin(), cfg);
  const auto& b = s.start();
  CHECK(b.batch_id == "t3_Eviction_present_current-r0");
  REQUIRE(b.items.size() == 3);
  CHECK(b.items[2].item_id == "t3_Eviction_present_current-r0-002");
  CHECK(b.items[0].source_raw_note_id == "n0");
  CHECK(b.items[0].generated_text == "Rewritten: patient 0 lives alone in an apartment.");
}

TEST_CASE("prompt rendering") {
  const auto& def = Taxonomy::builtin().definition_of(SdohLabel::EvictionPending);
  SUBCASE("each placeholder is substituted") {
    const auto p = render_augment_prompt("lives with sister", SdohLabel::EvictionPending, def);
    CHECK(p.find("Here is the raw note: lives with sister\n") != std::string::npos);
    CHECK(p.find("And the specific label: t3_Eviction_pending\n") != std::string::npos);
    CHECK(p.find(def.definition_text) != std::string::npos);
    CHECK(p.find("{raw_notes}") == std::string::npos);
    CHECK(p.find("{label}") == std::string::npos);
    CHECK(p.find("{definition}") == std::string::npos);
  }
  SUBCASE("placeholder text inside the note is not expanded") {
    const auto p = render_augment_prompt("says {label} and {definition}", SdohLabel::EvictionPending, def,
                                         "[{raw_notes}] [{label}] [{definition}]");
    CHECK(p.rfind("[says {label} and {definition}] [t3_Eviction_pending] [", 0) == 0);
  }
  SUBCASE("few-shot snippets follow the definition") {
    LabelDefinition d{SdohLabel::EvictionPending, "Pending eviction.", {"got a notice", "court date"}};
    const auto p = render_augment_prompt("x", SdohLabel::EvictionPending, d, "{raw_notes}|{label}|{definition}");
    CHECK(p == "x|t3_Eviction_pending|Pending eviction.\nFew-Shot Examples:\n- \"got a notice\"\n- \"court date\"");
  }
  SUBCASE("empty raw note") {
    try {
      render_augment_prompt("  \n", SdohLabel::EvictionPending, def);
      FAIL("expected EmptyRawNote");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyRawNote);
    }
  }
  SUBCASE("template missing a placeholder") {
    CHECK_FALSE(has_augment_placeholders("{raw_notes} {label}"));
    CHECK_THROWS_AS(render_augment_prompt("x", SdohLabel::EvictionPending, def, "{raw_notes} {label}"), Error);
  }
}

TEST_CASE("prompt revision retries once then fails") {
  std::vector<FeedbackItem> fb = {{"i0", "text", "mentions the definition"}};
  auto backend = std::make_shared<ScriptedBackend>();
  std::vector<std::string> replies;
  SUBCASE("second reply is valid") {
    replies = {"lost placeholders", "```\nNew {raw_notes} {label} {definition}\n```"};
    backend->otherwise([&replies, n = 0](const CompletionRequest&) mutable { return replies.at(n++); });
    auto gw = testing::scripted_gateway(backend);
    CHECK(optimize_prompt(kAugmentPromptTemplate, fb, gw) == "New {raw_notes} {label} {definition}");
    CHECK(backend->calls() == 2);
    const auto h = backend->history();
    CHECK(h[0].messages[0].content.find("mentions the definition") != std::string::npos);
    CHECK(h[0].messages[0].content.find(kAugmentPromptTemplate) != std::string::npos);
  }
  SUBCASE("both replies invalid") {
    backend->otherwise([](const CompletionRequest&) { return "{raw_notes} only"; });
    auto gw = testing::scripted_gateway(backend);
    try {
      optimize_prompt(kAugmentPromptTemplate, fb, gw);
      FAIL("expected InvalidRevision");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidRevision);
    }
    CHECK(backend->calls() == 2);
  }
  SUBCASE("no feedback") {
    auto gw = testing::scripted_gateway(backend);
    CHECK_THROWS_AS(optimize_prompt(kAugmentPromptTemplate, {}, gw), Error);
  }
}

TEST_CASE("verdict validation on a batch") {
  AugmentationBatch b;
  b.batch_id = "b";
  b.items = {{"a", "n0", "x", std::nullopt, false, ""}, {"b", "n1", "", std::nullopt, true, "boom"}};
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([&] { b.record_verdict("zz", true); }) == ErrorCode::UnknownItem);
  CHECK(code_of([&] { b.record_verdict("a", false); }) == ErrorCode::MissingFeedback);
  CHECK(code_of([&] { b.record_verdict("a", false, "   "); }) == ErrorCode::MissingFeedback);
  CHECK(code_of([&] { b.record_verdict("b", true); }) == ErrorCode::InvalidState);
  CHECK(code_of([&] { batch_accuracy(b); }) == ErrorCode::IncompleteVerdicts);
  b.record_verdict("a", true);
  CHECK(code_of([&] { b.record_verdict("a", true); }) == ErrorCode::AlreadyVerdicted);
  CHECK(b.complete());
  CHECK(batch_accuracy(b) == 1.0);  // failed item excluded
}

TEST_CASE("failed generations are excluded and their notes returned") {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->otherwise([](const CompletionRequest& req) -> std::string {
    const auto note = testing::raw_note_of(req);
    if (note.find("patient 1 ") != std::string::npos) return "   ";
    if (note.find("patient 2 ") != std::string::npos) throw Error(ErrorCode::ProviderError, "down");
    return "ok " + note;
  });
  GatewayOptions opts = testing::fast_options();
  opts.max_retries = 0;
  Gateway gw(backend, nullptr, opts);
  NotePool pool(testing::make_notes(4));
  AugmenterConfig cfg;
  cfg.batch_size = 4;
  AugmentationSession s(SdohLabel::EvictionAbsent, pool, gw, Taxonomy::builtin(), cfg);
  const auto& b = s.start();
  CHECK(b.failed() == 2);
  CHECK(b.items[1].error == "empty generation");
  CHECK_FALSE(b.items[2].error.empty());
  s.record_verdict(b.items[0].item_id, true);
  s.record_verdict(b.items[3].item_id, true);
  const auto r = s.advance();
  CHECK(r.accuracy == 1.0);
  CHECK(r.status == SessionStatus::Succeeded);
  CHECK(pool.get("n1").state == NoteState::Available);
  CHECK(pool.get("n2").state == NoteState::Available);
  CHECK(pool.get("n0").state == NoteState::InUse);
}

TEST_CASE("session guards") {
  auto gw = testing::scripted_gateway(testing::augment_backend());
  NotePool pool(testing::make_notes(4));
  const auto& tax = Taxonomy::builtin();
  CHECK_THROWS_AS(AugmentationSession(SdohLabel::Other, pool, gw, tax), Error);
  AugmenterConfig zero;
  zero.max_rounds = 0;
  CHECK_THROWS_AS(AugmentationSession(SdohLabel::EvictionAbsent, pool, gw, tax, zero), Error);
  CHECK_THROWS_AS(AugmentationSession(SdohLabel::EvictionAbsent, pool, gw, tax, {}, "no placeholders"), Error);

  AugmenterConfig cfg;
  cfg.batch_size = 2;
  AugmentationSession s(SdohLabel::EvictionAbsent, pool, gw, tax, cfg);
  CHECK_THROWS_AS(s.advance(), Error);
  s.start();
  CHECK_THROWS_AS(s.start(), Error);
  try {
    s.advance();
    FAIL("expected IncompleteVerdicts");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteVerdicts);
  }
  for (const auto& it : std::vector<BatchItem>(s.batch().items)) s.record_verdict(it.item_id, true);
  s.advance();
  CHECK_THROWS_AS(s.record_verdict("x", true), Error);
  CHECK_THROWS_AS(s.advance(), Error);
}

TEST_CASE("batch persistence round trips") {
  testing::TempDir dir;
  AugmentationBatch b;
  b.batch_id = "t3_Eviction_absent-r1";
  b.label = SdohLabel::EvictionAbsent;
  b.round_index = 1;
  b.items = {{"i0", "n0", "text one", Verdict{true, std::nullopt}, false, ""},
             {"i1", "n1", "text two", Verdict{false, "off topic"}, false, ""},
             {"i2", "n2", "", std::nullopt, true, "timeout"},
             {"i3", "n3", "pending", std::nullopt, false, ""}};
  b.save(dir / "b.ndjson");
  const auto c = AugmentationBatch::load(dir / "b.ndjson");
  CHECK(c.to_rows() == b.to_rows());
  CHECK(c.items[1].verdict->feedback == "off topic");
  CHECK_FALSE(c.items[3].verdict.has_value());
}

TEST_CASE("generation requests are deterministic per item") {
  auto backend = testing::augment_backend();
  auto gw = testing::scripted_gateway(backend);
  AugmenterState st;
  st.label = SdohLabel::EvictionAbsent;
  AugmenterConfig cfg;
  cfg.model_tag = "m";
  const auto notes = testing::make_notes(3);
  generate_batch(st, notes, gw, Taxonomy::builtin(), cfg);
  for (const auto& req : backend->history()) {
    CHECK(req.temperature == doctest::Approx(0.7));
    CHECK(req.model_tag == "m");
    REQUIRE(req.seed.has_value());
    CHECK(testing::raw_note_of(req).find("patient " + std::to_string(*req.seed) + " ") == 0);
  }
}
