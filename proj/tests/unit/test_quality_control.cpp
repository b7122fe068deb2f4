// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "sdoh/quality_control.hpp"
#include "test_support.hpp"

using namespace sdoh;

namespace {

constexpr SdohLabel kRequired = SdohLabel::EvictionPending;

AnnotateStep scripted_step(std::vector<std::string> labels, std::vector<std::size_t>* calls) {
  return [labels = std::move(labels), calls](std::string_view, std::size_t pass) {
    calls->push_back(pass);
    if (labels.at(pass) == "!") throw Error(ErrorCode::UnparseableOutput, "junk");
    AnnotationResult r;
    r.step = Step::Eviction;
    r.label = labels.at(pass);
    r.rationale = "pass " + std::to_string(pass);
    return r;
  };
}

}  // namespace

TEST_CASE("all 27 pass triples follow the acceptance rule") {
  const std::vector<std::string> alphabet = {"t3_Eviction_pending", "t3_Eviction_absent", "Other"};
  const std::string required(canonical_name(kRequired));
  int covered = 0, as_required = 0, as_annotated = 0, discarded = 0;
  for (const auto& a : alphabet) {
    for (const auto& b : alphabet) {
      for (const auto& c : alphabet) {
        NotePool pool(testing::make_notes(1));
        const auto id = pool.draw(1).front().id;
        std::vector<std::size_t> calls;
        const auto out = validate_example("note", kRequired, scripted_step({a, b, c}, &calls), pool, id);
        ++covered;
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(c);
        if (a == required) {
          ++as_required;
          CHECK(out.decision == Decision::AcceptedAsRequired);
          CHECK(out.final_label == kRequired);
          CHECK(calls == std::vector<std::size_t>{0});
          CHECK(pool.count(NoteState::InUse) == 1);
        } else if (a == b && b == c) {
          ++as_annotated;
          CHECK(out.decision == Decision::AcceptedAsAnnotated);
          CHECK(out.final_label == parse_label(a));
          CHECK(calls == std::vector<std::size_t>{0, 1, 2});
          CHECK(pool.count(NoteState::InUse) == 1);
        } else {
          ++discarded;
          CHECK(out.decision == Decision::Discarded);
          CHECK_FALSE(out.final_label.has_value());
          CHECK(calls == std::vector<std::size_t>{0, 1, 2});
          CHECK(pool.count(NoteState::Available) == 1);  // returned exactly once
          CHECK(pool.count(NoteState::InUse) == 0);
        }
        CHECK(out.passes.size() == calls.size());
      }
    }
  }
  CHECK(covered == 27);
  CHECK(as_required == 9);
  CHECK(as_annotated == 2);
  CHECK(discarded == 16);
}

TEST_CASE("two of three agreeing is still a discard") {
  NotePool pool(testing::make_notes(1));
  const auto id = pool.draw(1).front().id;
  std::vector<std::size_t> calls;
  const auto out = validate_example("n", kRequired,
                                    scripted_step({"Other", "Other", "t3_Eviction_absent"}, &calls), pool, id);
  CHECK(out.decision == Decision::Discarded);
}

TEST_CASE("failed passes never count as agreement") {
  NotePool pool(testing::make_notes(1));
  const auto id = pool.draw(1).front().id;
  std::vector<std::size_t> calls;
  SUBCASE("first pass fails") {
    const auto out = validate_example("n", kRequired, scripted_step({"!", "!", "!"}, &calls), pool, id);
    CHECK(out.decision == Decision::Discarded);
    CHECK_FALSE(out.passes[0].ok());
    CHECK_FALSE(out.passes[0].error.empty());
  }
  SUBCASE("a later pass fails") {
    const auto out = validate_example("n", kRequired, scripted_step({"Other", "!", "Other"}, &calls), pool, id);
    CHECK(out.decision == Decision::Discarded);
  }
  CHECK(pool.count(NoteState::Available) == 1);
}

TEST_CASE("Other is not a valid required label") {
  NotePool pool(testing::make_notes(1));
  std::vector<std::size_t> calls;
  CHECK_THROWS_AS(validate_example("n", SdohLabel::Other, scripted_step({"Other"}, &calls), pool, "n0"), Error);
}

TEST_CASE("discarding a note that is not in use surfaces the pool error") {
  NotePool pool(testing::make_notes(1));
  std::vector<std::size_t> calls;
  try {
    validate_example("n", kRequired, scripted_step({"Other", "t3_Eviction_absent", "Other"}, &calls), pool, "n0");
    FAIL("expected InvalidState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
}

TEST_CASE("step annotator picks the step and varies the seed per pass") {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->otherwise([](const CompletionRequest& req) {
    return testing::step_of(req) == Step::Eviction ? "Label: t3_Eviction_absent" : "Label: t1_Homelessness";
  });
  auto gw = testing::scripted_gateway(backend);
  ProgramSet programs;
  AnnotateOptions opts;
  opts.seed = 10;

  auto evict = make_step_annotator(programs, SdohLabel::EvictionPending, gw, opts);
  CHECK(evict("n", 0).label == "t3_Eviction_absent");
  CHECK(evict("n", 2).label == "t3_Eviction_absent");
  auto non = make_step_annotator(programs, SdohLabel::Homelessness, gw, opts);
  CHECK(non("n", 1).label == "t1_Homelessness");

  const auto h = backend->history();
  REQUIRE(h.size() == 3);
  CHECK(h[0].seed == 10);
  CHECK(h[1].seed == 12);
  CHECK(h[2].seed == 11);
}

TEST_CASE("decision names round trip") {
  for (auto d : {Decision::AcceptedAsRequired, Decision::AcceptedAsAnnotated, Decision::Discarded}) {
    CHECK(parse_decision(to_string(d)) == d);
  }
  CHECK_THROWS_AS(parse_decision("Maybe"), Error);
}
