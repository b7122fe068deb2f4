// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "sdoh/error.hpp"
#include "sdoh/metrics.hpp"
#include "metrics_oracle.hpp"

using namespace sdoh;

using testing::Oracle;
using testing::random_instance;

TEST_CASE("matrix metrics agree with a brute-force reference on 1000 random instances") {
  std::mt19937_64 rng(20261016);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto o = random_instance(rng);
    CAPTURE(trial);
    const auto m = confusion_matrix(o.golds, o.preds, o.labels);
    REQUIRE(m.total() == o.n());
    CHECK(std::abs(micro_f1(m) - o.micro()) <= 1e-12);
    CHECK(micro_f1(m) == o.accuracy());
    CHECK(std::abs(macro_f1(m) - o.macro()) <= 1e-12);
    for (std::size_t k = 0; k < o.labels.size(); ++k) {
      CHECK(std::abs(f1(m.counts(k)) - o.per_class_f1(o.labels[k])) <= 1e-12);
      CHECK(std::abs(mcc_binary(m, k) - o.binary_mcc(o.labels[k])) <= 1e-12);
    }
    CHECK(std::abs(mcc_multiclass(m) - o.multiclass_mcc()) <= 1e-12);
  }
}

TEST_CASE("hand-checked three-example fixture") {
  const auto m = confusion_matrix({"A", "A", "B"}, {"A", "B", "B"}, {"A", "B"});
  CHECK(micro_f1(m) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(macro_f1(m) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(f1(m.counts(0)) == doctest::Approx(2.0 / 3.0));
  CHECK(f1(m.counts(1)) == doctest::Approx(2.0 / 3.0));
  CHECK(mcc_binary(m, 0) == doctest::Approx(0.5));
}

TEST_CASE("out-of-set predictions") {
  const auto m = confusion_matrix({"A", "B"}, {"Other", "B"}, {"A", "B"});
  CHECK(m.cell(0, m.reserved_column()) == 1);
  CHECK(m.counts(1).fp == 0);
  CHECK(m.counts(0).fn == 1);
  CHECK(micro_f1(m) == 0.5);
  const auto r = make_report(m);
  CHECK(r.out_of_set_predictions == 1);
  CHECK(r.per_class.at("A").support == 1);
}

TEST_CASE("degenerate inputs") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([] { confusion_matrix({"A"}, {"A", "B"}, {"A", "B"}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { confusion_matrix({"Z"}, {"A"}, {"A", "B"}); }) == ErrorCode::UnknownGoldLabel);
  CHECK(code_of([] { make_report(ConfusionMatrix({"A"})); }) == ErrorCode::EmptyMatrix);
  CHECK(code_of([] { ci95({0.5}); }) == ErrorCode::TooFewRuns);
  CHECK(code_of([] { compare_to_baseline({0.5}, {0.1, 0.2}); }) == ErrorCode::TooFewRuns);

  // All-same predictions leave the MCC denominator at zero.
  const auto m = confusion_matrix({"A", "B"}, {"A", "A"}, {"A", "B"});
  CHECK(mcc_binary(m, 1) == 0.0);
  CHECK(f1(m.counts(1)) == 0.0);
}

TEST_CASE("confidence intervals") {
  SUBCASE("identical scores have zero width") {
    const auto ci = ci95({0.42, 0.42, 0.42, 0.42, 0.42});
    CHECK(ci.mean == 0.42);
    CHECK(ci.upper == ci.lower);
  }
  SUBCASE("two runs use the one-degree-of-freedom quantile") {
    // t(0.975, 1) = tan(0.475 pi); s = sqrt(0.02)
    const double half = std::tan(0.475 * M_PI) * std::sqrt(0.02) / std::sqrt(2.0);
    const auto ci = ci95({0.8, 1.0});
    CHECK(std::abs(ci.mean - 0.9) <= 1e-12);
    CHECK(std::abs(ci.lower - (0.9 - half)) <= 1e-9);
    CHECK(std::abs(ci.upper - (0.9 + half)) <= 1e-9);
  }
  SUBCASE("five runs match a reference quantile") {
    const std::vector<double> xs = {0.81, 0.83, 0.80, 0.84, 0.82};
    const double mean = 0.82;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double half = 2.7764451051977987 * std::sqrt(ss / 4) / std::sqrt(5.0);
    const auto ci = ci95(xs);
    CHECK(std::abs(ci.upper - (mean + half)) <= 1e-9);
  }
}

TEST_CASE("Welch test p-values match reference values") {
  CHECK(compare_to_baseline({0.81, 0.83, 0.80, 0.84, 0.82}, {0.78, 0.79, 0.77, 0.80, 0.76}) ==
        doctest::Approx(0.003949772803445226).epsilon(1e-9));
  CHECK(compare_to_baseline({0.5, 0.9, 0.7}, {0.6, 0.62, 0.61, 0.64, 0.59, 0.6}) ==
        doctest::Approx(0.5174958585003823).epsilon(1e-9));
  CHECK(compare_to_baseline({0.5, 0.6}, {0.5, 0.6}) == doctest::Approx(1.0));
}

TEST_CASE("multi-run report aggregates every score") {
  std::vector<MetricReport> runs;
  runs.push_back(make_report(confusion_matrix({"A", "B"}, {"A", "B"}, {"A", "B"})));
  runs.push_back(make_report(confusion_matrix({"A", "B"}, {"A", "A"}, {"A", "B"})));
  const auto mr = make_multi_run_report(runs);
  CHECK(mr.overall.at("micro_f1").mean == doctest::Approx(0.75));
  CHECK(mr.per_class.at("B").at("f1").mean == doctest::Approx(0.5));
  const auto table = render_table(mr);
  CHECK(table.find("Overall") != std::string::npos);
  CHECK(table.find("B") != std::string::npos);
  const auto j = to_json(mr);
  CHECK(j.contains("runs"));
  CHECK(render_table(runs[0]).find("1.000") != std::string::npos);
}
