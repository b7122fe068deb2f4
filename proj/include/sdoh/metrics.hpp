// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sdoh {

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

/// Gold x predicted counts over a fixed label set. Column `size()` is
/// reserved for predictions outside the label set (e.g. "Other"); those are
/// always wrong and never a false positive for any listed class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t reserved_column() const { return labels_.size(); }

  void add(std::size_t gold, std::size_t predicted, std::uint64_t n = 1);
  std::uint64_t cell(std::size_t gold, std::size_t predicted) const;
  std::uint64_t total() const { return total_; }
  std::uint64_t correct() const;
  std::uint64_t row_sum(std::size_t gold) const;
  std::uint64_t column_sum(std::size_t predicted) const;

  /// One-vs-rest counts for class `k`.
  ClassCounts counts(std::size_t k) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> cells_;  // size() x (size() + 1), row-major
  std::uint64_t total_ = 0;
};

/// Throws LengthMismatch when sizes differ and UnknownGoldLabel when a gold
/// token is outside `labelset`. Out-of-set predictions land in the reserved
/// column.
ConfusionMatrix confusion_matrix(const std::vector<std::string>& golds,
                                 const std::vector<std::string>& preds,
                                 const std::vector<std::string>& labelset);

double precision(const ClassCounts& c);
double recall(const ClassCounts& c);
/// 2TP / (2TP + FP + FN); 0 when the denominator is 0.
double f1(const ClassCounts& c);

/// Pooled F1. Every wrong prediction, reserved column included, is both a
/// false positive and a false negative at the pooled level, so the result
/// equals accuracy.
double micro_f1(const ConfusionMatrix& m);
/// Unweighted mean of per-class F1 over the matrix label set; classes with
/// no support and no predictions contribute 0.
double macro_f1(const ConfusionMatrix& m);
/// One-vs-rest MCC for class `k`; 0 when the denominator vanishes.
double mcc_binary(const ConfusionMatrix& m, std::size_t k);
/// Generalized (Gorodkin) MCC over the full matrix, reserved column
/// included as a prediction-only class; 0 when the denominator vanishes.
double mcc_multiclass(const ConfusionMatrix& m);

struct ConfidenceInterval {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// mean +/- t(0.975, n-1) * s / sqrt(n) with sample standard deviation s.
/// Throws TooFewRuns for fewer than two scores.
ConfidenceInterval ci95(const std::vector<double>& per_run_scores);

/// Two-sided Welch t-test p-value. Throws TooFewRuns when either side has
/// fewer than two runs.
double compare_to_baseline(const std::vector<double>& runs_a, const std::vector<double>& runs_b);

/// Correct only when Step 1 is right and, given that, the second-step label
/// is right.
bool cascaded_correct(std::string_view step1_pred, std::optional<std::string_view> second_step_pred,
                      std::string_view gold_binary, std::string_view gold_label);

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  std::uint64_t support = 0;
};

struct MetricReport {
  std::vector<std::string> labels;
  std::map<std::string, PerClassMetrics> per_class;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double mcc_multiclass = 0.0;
  double mcc_mean_per_class = 0.0;
  std::uint64_t total = 0;
  std::uint64_t out_of_set_predictions = 0;
};

/// Throws EmptyMatrix when the matrix has no examples.
MetricReport make_report(const ConfusionMatrix& m);

/// Per-run reports plus 95% intervals for every headline and per-class score.
struct MultiRunReport {
  std::vector<MetricReport> runs;
  std::map<std::string, ConfidenceInterval> overall;                      // micro_f1, macro_f1, ...
  std::map<std::string, std::map<std::string, ConfidenceInterval>> per_class;  // label -> metric
  std::optional<ConfidenceInterval> cascaded_accuracy;
};

MultiRunReport make_multi_run_report(std::vector<MetricReport> runs);

nlohmann::json to_json(const MetricReport& report);
nlohmann::json to_json(const MultiRunReport& report);

/// Aligned text table: one row per class (Precision, Recall, F1, MCC,
/// support) and an Overall row with Macro-F1, Micro-F1 and MCC.
std::string render_table(const MetricReport& report);
/// Same layout with "mean (lower-upper)" cells.
std::string render_table(const MultiRunReport& report);

}  // namespace sdoh
