// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "sdoh/annotator.hpp"
#include "sdoh/metrics.hpp"
#include "test_support.hpp"

using namespace sdoh;

namespace {

const std::vector<std::string>& eviction_tokens() { return legal_tokens(Step::Eviction); }

/// Backend answering each step from a per-note table; "?" answers are junk.
std::shared_ptr<ScriptedBackend> table_backend(std::map<std::string, std::map<Step, std::string>> answers) {
  auto b = std::make_shared<ScriptedBackend>();
  b->otherwise([answers = std::move(answers)](const CompletionRequest& req) -> std::string {
    const auto step = testing::step_of(req).value();
    const auto& label = answers.at(testing::note_of(req)).at(step);
    if (label == "?") return "I cannot decide.";
    return "Reasoning: because of " + testing::note_of(req) + ".\nLabel: " + label;
  });
  return b;
}

}  // namespace

TEST_CASE("parse: reasoning and label lines") {
  const auto p = parse_annotation_output("Reasoning: court date next week.\nLabel: t3_Eviction_pending",
                                         eviction_tokens());
  CHECK(p.label == "t3_Eviction_pending");
  CHECK(p.rationale == "court date next week.");
}

TEST_CASE("parse: multi-line reasoning is kept whole") {
  const auto p = parse_annotation_output("Reasoning: line one\nline two\n\nAnswer: No", legal_tokens(Step::Binary));
  CHECK(p.label == "No");
  CHECK(p.rationale == "line one\nline two");
}

TEST_CASE("parse: the last label line wins") {
  const auto p = parse_annotation_output("Label: Yes\nOn reflection...\nLabel: No", legal_tokens(Step::Binary));
  CHECK(p.label == "No");
}

TEST_CASE("parse: markdown emphasis and DSPy field names") {
  const auto p = parse_annotation_output("**Reasoning:** tenant received notice\n**SDoH Annotation:** "
                                         "t3_Eviction_pending",
                                         eviction_tokens());
  CHECK(p.label == "t3_Eviction_pending");
  CHECK(p.rationale == "tenant received notice");
}

TEST_CASE("parse: free text falls back to the last bounded token") {
  const auto p = parse_annotation_output("The best fit is t3_Eviction_mr_history here.", eviction_tokens());
  CHECK(p.label == "t3_Eviction_mr_history");
  CHECK(p.rationale == "The best fit is t3_Eviction_mr_history here.");
}

TEST_CASE("parse: tokens embedded in longer words do not count") {
  CHECK_THROWS_AS(parse_annotation_output("Label: Yesterday", legal_tokens(Step::Binary)), Error);
  CHECK(parse_annotation_output("Label: No.", legal_tokens(Step::Binary)).label == "No");
}

TEST_CASE("parse: no legal token") {
  try {
    parse_annotation_output("Label: t3_Eviction_unknown", eviction_tokens());
    FAIL("expected UnparseableOutput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnparseableOutput);
  }
}

TEST_CASE("parse: a label line without reasoning keeps the raw text as rationale") {
  const auto p = parse_annotation_output("Label: Yes", legal_tokens(Step::Binary));
  CHECK(p.label == "Yes");
  CHECK(p.rationale == "Label: Yes");
}

TEST_CASE("render: instruction, demos, then the note") {
  auto program = default_program(Step::Eviction);
  program.demos = {{"note A", "why A", "t3_Eviction_pending", DemoOrigin::Bootstrapped},
                   {"note B", "", "Other", DemoOrigin::Labeled}};
  const auto msgs = render_messages(program, "target note");
  REQUIRE(msgs.size() == 6);
  CHECK(msgs[0].role == "system");
  CHECK(msgs[0].content.find(program.instruction) == 0);
  CHECK(msgs[0].content.find("Reasoning:") != std::string::npos);
  CHECK(msgs[1].content == "Note: note A");
  CHECK(msgs[2].content == "Reasoning: why A\nLabel: t3_Eviction_pending");
  CHECK(msgs[4].content == "Label: Other");
  CHECK(msgs[5].content == "Note: target note");
}

TEST_CASE("render: without chain of thought there is no reasoning field") {
  auto program = default_program(Step::Binary);
  program.chain_of_thought = false;
  CHECK(render_messages(program, "x")[0].content.find("Reasoning:") == std::string::npos);
}

TEST_CASE("annotate reprompts once on unparseable output") {
  auto b = std::make_shared<ScriptedBackend>();
  b->on([](const CompletionRequest& r) { return r.messages.back().role == "user" &&
                                                r.messages.back().content.find("did not contain") != std::string::npos; },
        [](const CompletionRequest&) { return "Label: Yes"; });
  b->otherwise([](const CompletionRequest&) { return "hmm"; });
  auto gw = testing::scripted_gateway(b);
  const auto r = annotate_binary("note", default_program(Step::Binary), gw);
  CHECK(r.label == "Yes");
  CHECK(b->calls() == 2);
}

TEST_CASE("annotate gives up after the reprompt") {
  auto b = std::make_shared<ScriptedBackend>();
  b->otherwise([](const CompletionRequest&) { return "no idea"; });
  auto gw = testing::scripted_gateway(b);
  try {
    annotate(default_program(Step::Binary), "note", gw);
    FAIL("expected UnparseableOutput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnparseableOutput);
  }
  CHECK(b->calls() == 2);
}

TEST_CASE("step-specific entry points check the program") {
  auto gw = testing::scripted_gateway(std::make_shared<ScriptedBackend>());
  CHECK_THROWS_AS(annotate_eviction("n", default_program(Step::Binary), gw), Error);
  CHECK_THROWS_AS(annotate_non_eviction("n", default_program(Step::Eviction), gw), Error);
}

TEST_CASE("annotate passes options through to the request") {
  auto b = std::make_shared<ScriptedBackend>();
  b->otherwise([](const CompletionRequest&) { return "Label: No"; });
  auto gw = testing::scripted_gateway(b);
  AnnotateOptions o;
  o.temperature = 0.5;
  o.seed = 9;
  o.run_index = 3;
  o.max_tokens = 99;
  o.model_tag = "mini";
  const auto r = annotate(default_program(Step::Binary), "n", gw, o);
  CHECK(r.run_index == 3);
  const auto req = b->history().front();
  CHECK(req.temperature == 0.5);
  CHECK(req.seed == 9);
  CHECK(req.max_tokens == 99);
  CHECK(req.model_tag == "mini");
}

TEST_CASE("cascade routing is total") {
  auto backend = table_backend({
      {"yes-note", {{Step::Binary, "Yes"}, {Step::Eviction, "t3_Eviction_pending"}, {Step::NonEviction, "Other"}}},
      {"no-note", {{Step::Binary, "No"}, {Step::Eviction, "t3_Eviction_absent"}, {Step::NonEviction, "t1_Homelessness"}}},
      {"junk-note", {{Step::Binary, "?"}, {Step::Eviction, "t3_Eviction_absent"}, {Step::NonEviction, "Other"}}},
      {"bad-second", {{Step::Binary, "Yes"}, {Step::Eviction, "?"}, {Step::NonEviction, "Other"}}},
  });
  auto gw = testing::scripted_gateway(backend);
  ProgramSet programs;

  SUBCASE("Yes goes to Step 2 only") {
    const auto t = annotate_cascade("1", "yes-note", programs, gw);
    CHECK(t.step1->label == "Yes");
    CHECK(t.second->step == Step::Eviction);
    CHECK(t.final_label == "t3_Eviction_pending");
    for (const auto& r : backend->history()) CHECK(testing::step_of(r) != Step::NonEviction);
  }
  SUBCASE("No goes to Step 3 only") {
    const auto t = annotate_cascade("2", "no-note", programs, gw);
    CHECK(t.second->step == Step::NonEviction);
    CHECK(t.final_label == "t1_Homelessness");
    for (const auto& r : backend->history()) CHECK(testing::step_of(r) != Step::Eviction);
    const auto j = t.to_json();
    CHECK(j["step1_label"] == "No");
    CHECK(j["second_step"] == "non_eviction");
    CHECK(j["program_version"] == "b0.e0.n0");
  }
  SUBCASE("unparseable Step 1 raises with a partial trace and runs nothing else") {
    try {
      annotate_cascade("3", "junk-note", programs, gw);
      FAIL("expected CascadeError");
    } catch (const CascadeError& e) {
      CHECK(e.code() == ErrorCode::UnparseableOutput);
      CHECK(e.partial().note_id == "3");
      CHECK_FALSE(e.partial().step1.has_value());
      CHECK_FALSE(e.partial().second.has_value());
    }
    for (const auto& r : backend->history()) CHECK(testing::step_of(r) == Step::Binary);
  }
  SUBCASE("Step 2 failure keeps the Step 1 result in the trace") {
    try {
      annotate_cascade("4", "bad-second", programs, gw);
      FAIL("expected CascadeError");
    } catch (const CascadeError& e) {
      REQUIRE(e.partial().step1.has_value());
      CHECK(e.partial().step1->label == "Yes");
      CHECK_FALSE(e.partial().second.has_value());
    }
  }
}

TEST_CASE("cascaded correctness gates on Step 1") {
  CHECK(cascaded_correct("Yes", std::string_view("t3_Eviction_pending"), "Yes", "t3_Eviction_pending"));
  CHECK_FALSE(cascaded_correct("No", std::string_view("t3_Eviction_pending"), "Yes", "t3_Eviction_pending"));
  CHECK_FALSE(cascaded_correct("Yes", std::string_view("t3_Eviction_absent"), "Yes", "t3_Eviction_pending"));
  CHECK_FALSE(cascaded_correct("Yes", std::nullopt, "Yes", "t3_Eviction_pending"));
  CHECK(cascaded_correct("No", std::string_view("t1_Homelessness"), "No", "t1_Homelessness"));
}
