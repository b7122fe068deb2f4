// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sdoh/error.hpp"

namespace sdoh {
namespace {

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void require_nonempty(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no examples");
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), cells_(labels_.size() * (labels_.size() + 1), 0) {}

void ConfusionMatrix::add(std::size_t gold, std::size_t predicted, std::uint64_t n) {
  if (gold >= size() || predicted > size()) {
    throw Error(ErrorCode::InvalidArgument, "confusion matrix index out of range");
  }
  cells_[gold * (size() + 1) + predicted] += n;
  total_ += n;
}

std::uint64_t ConfusionMatrix::cell(std::size_t gold, std::size_t predicted) const {
  return cells_.at(gold * (size() + 1) + predicted);
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t c = 0;
  for (std::size_t k = 0; k < size(); ++k) c += cell(k, k);
  return c;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j <= size(); ++j) s += cell(gold, j);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += cell(i, predicted);
  return s;
}

ClassCounts ConfusionMatrix::counts(std::size_t k) const {
  ClassCounts c;
  c.tp = cell(k, k);
  c.fn = row_sum(k) - c.tp;
  c.fp = column_sum(k) - c.tp;
  c.tn = total_ - c.tp - c.fn - c.fp;
  return c;
}

ConfusionMatrix confusion_matrix(const std::vector<std::string>& golds,
                                 const std::vector<std::string>& preds,
                                 const std::vector<std::string>& labelset) {
  if (golds.size() != preds.size()) {
    throw Error(ErrorCode::LengthMismatch, "golds has " + std::to_string(golds.size()) +
                                               " entries, preds has " + std::to_string(preds.size()));
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labelset.size(); ++i) index.emplace(labelset[i], i);
  ConfusionMatrix m(labelset);
  for (std::size_t i = 0; i < golds.size(); ++i) {
    auto g = index.find(golds[i]);
    if (g == index.end()) {
      throw Error(ErrorCode::UnknownGoldLabel, "gold label '" + golds[i] + "' not in label set");
    }
    auto p = index.find(preds[i]);
    m.add(g->second, p == index.end() ? m.reserved_column() : p->second);
  }
  return m;
}

double precision(const ClassCounts& c) {
  return safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
}

double recall(const ClassCounts& c) {
  return safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
}

double f1(const ClassCounts& c) {
  return safe_ratio(static_cast<double>(2 * c.tp), static_cast<double>(2 * c.tp + c.fp + c.fn));
}

double micro_f1(const ConfusionMatrix& m) {
  require_nonempty(m);
  const std::uint64_t tp = m.correct();
  const std::uint64_t wrong = m.total() - tp;
  return safe_ratio(static_cast<double>(2 * tp), static_cast<double>(2 * tp + 2 * wrong));
}

double macro_f1(const ConfusionMatrix& m) {
  require_nonempty(m);
  if (m.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) sum += f1(m.counts(k));
  return sum / static_cast<double>(m.size());
}

double mcc_binary(const ConfusionMatrix& m, std::size_t k) {
  require_nonempty(m);
  const auto c = m.counts(k);
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

double mcc_multiclass(const ConfusionMatrix& m) {
  require_nonempty(m);
  const double s = static_cast<double>(m.total());
  const double c = static_cast<double>(m.correct());
  double sum_pt = 0.0, sum_pp = 0.0, sum_tt = 0.0;
  for (std::size_t k = 0; k <= m.size(); ++k) {
    const double p = static_cast<double>(m.column_sum(k));
    const double t = k < m.size() ? static_cast<double>(m.row_sum(k)) : 0.0;
    sum_pt += p * t;
    sum_pp += p * p;
    sum_tt += t * t;
  }
  const double den = (s * s - sum_pp) * (s * s - sum_tt);
  if (den <= 0.0) return 0.0;
  return (c * s - sum_pt) / std::sqrt(den);
}

ConfidenceInterval ci95(const std::vector<double>& per_run_scores) {
  const auto n = per_run_scores.size();
  if (n < 2) throw Error(ErrorCode::TooFewRuns, "ci95 needs at least two runs");
  const auto [lo, hi] = std::minmax_element(per_run_scores.begin(), per_run_scores.end());
  // Identical scores: the rounded mean can sit one ulp off and leave a
  // spurious non-zero spread.
  if (*lo == *hi) return {*lo, *lo, *lo};
  const double mean = mean_of(per_run_scores);
  const double s = std::sqrt(sample_variance(per_run_scores, mean));
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.975);
  const double half = t * s / std::sqrt(static_cast<double>(n));
  return {mean, mean - half, mean + half};
}

double compare_to_baseline(const std::vector<double>& runs_a, const std::vector<double>& runs_b) {
  if (runs_a.size() < 2 || runs_b.size() < 2) {
    throw Error(ErrorCode::TooFewRuns, "Welch t-test needs at least two runs per side");
  }
  const double na = static_cast<double>(runs_a.size());
  const double nb = static_cast<double>(runs_b.size());
  const double ma = mean_of(runs_a), mb = mean_of(runs_b);
  const double va = sample_variance(runs_a, ma) / na;
  const double vb = sample_variance(runs_b, mb) / nb;
  const double se2 = va + vb;
  if (se2 == 0.0) return ma == mb ? 1.0 : 0.0;
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

bool cascaded_correct(std::string_view step1_pred, std::optional<std::string_view> second_step_pred,
                      std::string_view gold_binary, std::string_view gold_label) {
  if (step1_pred != gold_binary) return false;
  return second_step_pred && *second_step_pred == gold_label;
}

MetricReport make_report(const ConfusionMatrix& m) {
  require_nonempty(m);
  MetricReport r;
  r.labels = m.labels();
  r.total = m.total();
  for (std::size_t i = 0; i < m.size(); ++i) r.out_of_set_predictions += m.cell(i, m.reserved_column());
  double mcc_sum = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto c = m.counts(k);
    PerClassMetrics pc{precision(c), recall(c), f1(c), mcc_binary(m, k), c.tp + c.fn};
    mcc_sum += pc.mcc;
    r.per_class[m.labels()[k]] = pc;
  }
  r.micro_f1 = micro_f1(m);
  r.macro_f1 = macro_f1(m);
  r.mcc_multiclass = mcc_multiclass(m);
  r.mcc_mean_per_class = m.size() == 0 ? 0.0 : mcc_sum / static_cast<double>(m.size());
  return r;
}

MultiRunReport make_multi_run_report(std::vector<MetricReport> runs) {
  if (runs.size() < 2) throw Error(ErrorCode::TooFewRuns, "multi-run report needs two or more runs");
  MultiRunReport out;
  auto collect = [&](auto getter) {
    std::vector<double> xs;
    for (const auto& r : runs) xs.push_back(getter(r));
    return ci95(xs);
  };
  out.overall["micro_f1"] = collect([](const MetricReport& r) { return r.micro_f1; });
  out.overall["macro_f1"] = collect([](const MetricReport& r) { return r.macro_f1; });
  out.overall["mcc_multiclass"] = collect([](const MetricReport& r) { return r.mcc_multiclass; });
  out.overall["mcc_mean_per_class"] =
      collect([](const MetricReport& r) { return r.mcc_mean_per_class; });
  for (const auto& label : runs.front().labels) {
    auto& slot = out.per_class[label];
    slot["f1"] = collect([&](const MetricReport& r) { return r.per_class.at(label).f1; });
    slot["mcc"] = collect([&](const MetricReport& r) { return r.per_class.at(label).mcc; });
    slot["precision"] =
        collect([&](const MetricReport& r) { return r.per_class.at(label).precision; });
    slot["recall"] = collect([&](const MetricReport& r) { return r.per_class.at(label).recall; });
  }
  out.runs = std::move(runs);
  return out;
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [label, pc] : report.per_class) {
    per_class[label] = {{"precision", pc.precision},
                        {"recall", pc.recall},
                        {"f1", pc.f1},
                        {"mcc", pc.mcc},
                        {"support", pc.support}};
  }
  return {{"labels", report.labels},
          {"per_class", per_class},
          {"micro_f1", report.micro_f1},
          {"macro_f1", report.macro_f1},
          {"mcc_multiclass", report.mcc_multiclass},
          {"mcc_mean_per_class", report.mcc_mean_per_class},
          {"total", report.total},
          {"out_of_set_predictions", report.out_of_set_predictions}};
}

namespace {

nlohmann::json ci_json(const ConfidenceInterval& ci) {
  return {{"mean", ci.mean}, {"lower", ci.lower}, {"upper", ci.upper}};
}

std::string fmt3(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << x;
  return out.str();
}

std::string fmt_ci(const ConfidenceInterval& ci) {
  return fmt3(ci.mean) + " (" + fmt3(ci.lower) + "-" + fmt3(ci.upper) + ")";
}

std::string render_rows(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  };
  widen(header);
  for (const auto& row : rows) widen(row);
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << row[i];
    }
    out << '\n';
  };
  emit(header);
  std::size_t line = 0;
  for (auto w : width) line += w;
  out << std::string(line + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) {
    if (row.front() == "Overall") out << std::string(line + 2 * (width.size() - 1), '-') << '\n';
    emit(row);
  }
  return out.str();
}

}  // namespace

nlohmann::json to_json(const MultiRunReport& report) {
  nlohmann::json overall = nlohmann::json::object();
  for (const auto& [k, ci] : report.overall) overall[k] = ci_json(ci);
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [label, metrics] : report.per_class) {
    for (const auto& [k, ci] : metrics) per_class[label][k] = ci_json(ci);
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) runs.push_back(to_json(r));
  nlohmann::json doc = {{"n_runs", report.runs.size()},
                        {"ci_method", "student_t_95"},
                        {"overall", overall},
                        {"per_class", per_class},
                        {"runs", runs}};
  if (report.cascaded_accuracy) doc["cascaded_accuracy"] = ci_json(*report.cascaded_accuracy);
  return doc;
}

std::string render_table(const MetricReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& label : report.labels) {
    const auto& pc = report.per_class.at(label);
    rows.push_back({label, fmt3(pc.precision), fmt3(pc.recall), fmt3(pc.f1), fmt3(pc.mcc),
                    std::to_string(pc.support)});
  }
  rows.push_back({"Overall", "", "",
                  "Macro " + fmt3(report.macro_f1) + " / Micro " + fmt3(report.micro_f1),
                  fmt3(report.mcc_multiclass), std::to_string(report.total)});
  return render_rows({"Label", "Precision", "Recall", "F1", "MCC", "Support"}, rows);
}

std::string render_table(const MultiRunReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& label : report.runs.front().labels) {
    const auto& m = report.per_class.at(label);
    rows.push_back({label, fmt_ci(m.at("f1")), fmt_ci(m.at("mcc"))});
  }
  rows.push_back({"Overall",
                  "Macro " + fmt_ci(report.overall.at("macro_f1")) + " / Micro " +
                      fmt_ci(report.overall.at("micro_f1")),
                  fmt_ci(report.overall.at("mcc_multiclass"))});
  std::string out = render_rows({"Label", "F1 (95% CI)", "MCC (95% CI)"}, rows);
  out += "runs: " + std::to_string(report.runs.size()) + "\n";
  if (report.cascaded_accuracy) {
    out += "cascaded accuracy: " + fmt_ci(*report.cascaded_accuracy) + "\n";
  }
  return out;
}

}  // namespace sdoh
