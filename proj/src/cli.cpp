// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <map>
#include <set>
#include <thread>

#include "sdoh/config.hpp"
#include "sdoh/dataset.hpp"
#include "sdoh/metrics.hpp"
#include "sdoh/optimizer.hpp"
#include "sdoh/quality_control.hpp"
#include "sdoh/review.hpp"
#include "sdoh/util.hpp"

namespace sdoh {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested = true; }

struct Context {
  std::string config_path;
  std::ostream* out = nullptr;

  PipelineConfig config() const {
    return config_path.empty() ? PipelineConfig::defaults() : PipelineConfig::load(config_path);
  }
};

std::string row_id(const json& row) {
  for (const char* key : {"id", "item_id", "note_id"}) {
    if (row.contains(key) && row[key].is_string()) return row[key].get<std::string>();
  }
  throw Error(ErrorCode::InvalidArgument, "row has no id: " + row.dump());
}

std::string row_text(const json& row) {
  if (row.contains("text") && row["text"].is_string()) return row["text"].get<std::string>();
  throw Error(ErrorCode::InvalidArgument, "row has no text: " + row_id(row));
}

json error_json(const Error& e) { return {{"code", to_string(e.code())}, {"message", e.what()}}; }

json accepted_rows(const std::vector<AcceptedNote>& accepted) {
  json rows = json::array();
  for (const auto& a : accepted) {
    rows.push_back({{"item_id", a.item_id},
                    {"source_raw_note_id", a.source_raw_note_id},
                    {"text", a.text},
                    {"label", canonical_name(a.label)},
                    {"round_index", a.round_index}});
  }
  return rows;
}

std::vector<json> as_rows(const json& array) { return {array.begin(), array.end()}; }

std::vector<std::string> labelset_tokens(const std::string& name) {
  std::vector<std::string> out;
  auto add = [&](const auto& classes) {
    for (auto l : classes) out.emplace_back(canonical_name(l));
  };
  if (name == "eviction") {
    add(kEvictionClasses);
  } else if (name == "non-eviction" || name == "non_eviction") {
    add(kNonEvictionClasses);
  } else if (name == "binary") {
    out = {"Yes", "No"};
  } else if (name == "all") {
    add(kAllClasses);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown labelset '" + name + "'");
  }
  return out;
}

std::string binary_gold(const std::string& label) {
  if (label == "Yes" || label == "No") return label;
  return is_eviction_related(parse_label(label)) ? "Yes" : "No";
}

std::string pred_token(const json& row, bool binary) {
  const char* key = binary && row.contains("step1_label") ? "step1_label" : "label";
  if (!row.contains(key) || !row[key].is_string()) return "";
  return row[key].get<std::string>();
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string input, out, scan;
  bool keep_all = false;
  bool require_keyword = false;
};

int cmd_ingest(const Context& ctx, const IngestArgs& a) {
  const auto cfg = ctx.config();
  const auto notes = ingest_raw_notes(a.input);
  std::vector<RawNote> kept;
  std::vector<json> scan_rows;
  std::size_t with_sh = 0;
  for (const auto& note : notes) {
    const auto hits = keyword_scan(note.full_text, cfg.keywords);
    json labels = json::array();
    for (auto l : hits) labels.push_back(canonical_name(l));
    scan_rows.push_back({{"id", note.id}, {"has_social_history", note.social_history.has_value()}, {"labels", labels}});
    const bool usable = note.social_history && !trim(*note.social_history).empty();
    if (usable) ++with_sh;
    if (!usable && !a.keep_all) continue;
    if (a.require_keyword && hits.empty()) continue;
    kept.push_back(note);
  }
  NotePool(kept).save(a.out);
  if (!a.scan.empty()) write_ndjson(a.scan, scan_rows);
  *ctx.out << json{{"read", notes.size()}, {"with_social_history", with_sh}, {"pooled", kept.size()}}.dump()
           << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// augment / review-serve

struct AugmentArgs {
  std::string label, pool, pool_out, out, verdicts, accepted, state, prompt;
  std::size_t batch = 0;
};

AugmenterConfig augmenter_config(const PipelineConfig& cfg, std::size_t batch) {
  auto ac = cfg.augmenter;
  if (batch > 0) ac.batch_size = batch;
  return ac;
}

std::optional<std::string> initial_prompt(const PipelineConfig& cfg, const std::string& prompt_path) {
  if (!prompt_path.empty()) {
    auto text = read_text_file(prompt_path);
    if (!has_augment_placeholders(text)) {
      throw Error(ErrorCode::ConfigError, "prompt file lacks {raw_notes}, {label} or {definition}");
    }
    return text;
  }
  return cfg.augment_prompt;
}

int cmd_augment(const Context& ctx, const AugmentArgs& a) {
  const auto cfg = ctx.config();
  const auto label = parse_label(a.label);
  const auto prompt = initial_prompt(cfg, a.prompt);
  auto pool = NotePool::load(a.pool);
  const auto pool_out = a.pool_out.empty() ? a.pool : a.pool_out;
  auto gateway = cfg.make_gateway();

  auto session = std::make_unique<AugmentationSession>(label, pool, *gateway, *cfg.taxonomy,
                                                       augmenter_config(cfg, a.batch), prompt);
  session->start();

  if (a.verdicts.empty()) {
    session->batch().save(a.out);
    pool.save(pool_out);
    *ctx.out << json{{"batch_id", session->batch().batch_id},
                     {"items", session->batch().items.size()},
                     {"failed", session->batch().failed()}}
                    .dump()
             << "\n";
    return 0;
  }

  // Scripted verdicts go through the same review service the HTTP API uses.
  std::map<std::string, json> verdicts;
  for (const auto& row : read_ndjson(a.verdicts)) verdicts[row.at("item_id").get<std::string>()] = row;

  ReviewService service(*cfg.taxonomy);
  AugmentationSession* sess = session.get();
  auto batch_id = service.add_session(std::move(session));
  std::vector<json> batch_rows;
  while (true) {
    for (const auto& view : service.list_pending(batch_id)) {
      auto it = verdicts.find(view.item_id);
      if (it == verdicts.end()) {
        throw Error(ErrorCode::IncompleteVerdicts, "no scripted verdict for item '" + view.item_id + "'");
      }
      std::optional<std::string> feedback;
      if (it->second.contains("feedback") && it->second["feedback"].is_string()) {
        feedback = it->second["feedback"].get<std::string>();
      }
      service.submit_verdict(view.item_id, it->second.at("passed").get<bool>(), feedback, "cli");
    }
    for (auto& row : sess->batch().to_rows()) batch_rows.push_back(std::move(row));
    const auto step = service.advance_round(batch_id);
    if (step["next_batch_id"].is_null()) break;
    batch_id = step["next_batch_id"].get<std::string>();
  }

  write_ndjson(a.out, batch_rows);
  if (!a.accepted.empty()) write_ndjson(a.accepted, as_rows(accepted_rows(sess->accepted())));
  if (!a.state.empty()) write_text_file(a.state, sess->state().to_json().dump(2) + "\n");
  pool.save(pool_out);
  if (sess->status() == SessionStatus::ThresholdNotReached) {
    throw Error(ErrorCode::ThresholdNotReached, "accuracy threshold not reached after " +
                                                    std::to_string(sess->state().round_index) + " round(s)");
  }
  *ctx.out << json{{"rounds", sess->state().round_index},
                   {"optimizations", sess->optimize_calls()},
                   {"accepted", sess->accepted().size()}}
                  .dump()
           << "\n";
  return 0;
}

struct ReviewServeArgs {
  std::string label, pool, pool_out, out_dir, prompt, host = "127.0.0.1";
  std::size_t batch = 0;
  int port = 8080;
};

int cmd_review_serve(const Context& ctx, const ReviewServeArgs& a) {
  const auto cfg = ctx.config();
  const auto label = parse_label(a.label);
  const auto prompt = initial_prompt(cfg, a.prompt);
  auto pool = NotePool::load(a.pool);
  const auto pool_out = a.pool_out.empty() ? a.pool : a.pool_out;
  auto gateway = cfg.make_gateway();

  auto session = std::make_unique<AugmentationSession>(label, pool, *gateway, *cfg.taxonomy,
                                                       augmenter_config(cfg, a.batch), prompt);
  session->start();
  const AugmentationSession* sess = session.get();
  ReviewService service(*cfg.taxonomy, fs::path(a.out_dir));
  const auto batch_id = service.add_session(std::move(session));
  pool.save(pool_out);

  ReviewHttpServer server(service);
  const int port = server.start(a.host, a.port);
  *ctx.out << json{{"port", port}, {"batch_id", batch_id}}.dump() << std::endl;

  g_stop_requested = false;
  std::signal(SIGINT, on_stop_signal);
  std::signal(SIGTERM, on_stop_signal);
  while (!g_stop_requested) {
    // Finished sessions stay served briefly so clients can read the result.
    if (service.state_transitions() > 0 && sess->status() != SessionStatus::Running) {
      std::this_thread::sleep_for(std::chrono::milliseconds(500));
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  pool.save(pool_out);
  if (sess->status() == SessionStatus::ThresholdNotReached) {
    throw Error(ErrorCode::ThresholdNotReached, "accuracy threshold not reached");
  }
  *ctx.out << json{{"status", sess->status() == SessionStatus::Succeeded ? "succeeded" : "interrupted"},
                   {"accepted", sess->accepted().size()}}
                  .dump()
           << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
  std::string accepted, pool, pool_out, out, decisions, split = "sft", source = "synth";
};

int cmd_validate(const Context& ctx, const ValidateArgs& a) {
  const auto cfg = ctx.config();
  const auto split = parse_split(a.split);
  const auto source = parse_record_source(a.source);
  const auto rows = read_ndjson(a.accepted);
  auto pool = NotePool::load(a.pool);
  const auto pool_out = a.pool_out.empty() ? a.pool : a.pool_out;
  auto gateway = cfg.make_gateway();

  AnnotateOptions opts;
  opts.seed = static_cast<std::int64_t>(cfg.seed);
  opts.model_tag = cfg.model_tag;

  std::vector<std::optional<ValidationOutcome>> outcomes(rows.size());
  parallel_for(rows.size(), cfg.gateway.max_in_flight, [&](std::size_t i) {
    const auto label = parse_label(rows[i].at("label").get<std::string>());
    const auto step = make_step_annotator(cfg.programs, label, *gateway, opts);
    outcomes[i] = validate_example(row_text(rows[i]), label, step, pool,
                                   rows[i].at("source_raw_note_id").get<std::string>());
  });

  std::vector<Record> records;
  std::set<std::string> seen;
  std::vector<json> log;
  std::map<std::string, std::size_t> tally;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& outcome = *outcomes[i];
    const auto text = row_text(rows[i]);
    const auto source_id = rows[i].at("source_raw_note_id").get<std::string>();
    json passes = json::array();
    for (const auto& p : outcome.passes) passes.push_back(p.ok() ? json(p.result->label) : json());
    json entry = {{"item_id", row_id(rows[i])},
                  {"source_raw_note_id", source_id},
                  {"required_label", rows[i].at("label")},
                  {"decision", to_string(outcome.decision)},
                  {"final_label", outcome.final_label ? json(canonical_name(*outcome.final_label)) : json()},
                  {"passes", passes}};
    ++tally[std::string(to_string(outcome.decision))];
    if (outcome.decision != Decision::Discarded) {
      pool.consume(source_id);
      if (*outcome.final_label == SdohLabel::Other) {
        entry["written"] = false;
      } else {
        Record r;
        r.id = make_record_id(text);
        r.text = text;
        r.label = *outcome.final_label;
        r.rationale = outcome.passes.front().result->rationale;
        r.source = source;
        r.split = split;
        r.provenance = outcome.decision == Decision::AcceptedAsRequired ? Provenance::AcceptedAsRequired
                                                                        : Provenance::AcceptedAsAnnotated;
        entry["record_id"] = r.id;
        const bool fresh = seen.insert(r.id).second;
        entry["written"] = fresh;
        if (fresh) records.push_back(std::move(r));
      }
    }
    log.push_back(std::move(entry));
  }
  save_records(a.out, records);
  if (!a.decisions.empty()) write_ndjson(a.decisions, log);
  pool.save(pool_out);
  *ctx.out << json{{"examples", rows.size()}, {"records", records.size()}, {"decisions", tally}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::string step, train, dev, out;
  std::size_t candidates = 16, max_demos = 8;
  std::optional<std::uint64_t> seed;
};

int cmd_optimize(const Context& ctx, const OptimizeArgs& a) {
  const auto cfg = ctx.config();
  const auto step = parse_step(a.step);
  const auto train = load_labeled_examples(a.train);
  const auto dev = load_labeled_examples(a.dev);
  auto gateway = cfg.make_gateway();

  OptimizerConfig oc;
  oc.num_candidates = a.candidates;
  oc.max_demos = a.max_demos;
  oc.seed = a.seed.value_or(cfg.seed);
  oc.max_parallel = cfg.gateway.max_in_flight;
  AnnotateOptions opts;
  opts.model_tag = cfg.model_tag;
  const auto result = optimize(cfg.programs.for_step(step), train, dev, oc, *gateway, opts);
  write_text_file(a.out, result.to_json(oc).dump(2) + "\n");
  *ctx.out << json{{"best_index", result.best_index},
                   {"best_score", result.score_table.at(result.best_index).score},
                   {"bootstrapped", result.bootstrapped.size()}}
                  .dump()
           << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// annotate

struct AnnotateArgs {
  std::string input, out, mode = "cascade";
  std::size_t runs = 1;
};

int cmd_annotate(const Context& ctx, const AnnotateArgs& a) {
  const auto cfg = ctx.config();
  const bool cascade = a.mode == "cascade";
  std::optional<Step> step;
  if (!cascade) step = parse_step(a.mode);
  if (a.runs == 0) throw Error(ErrorCode::InvalidArgument, "--runs must be positive");
  const auto rows = read_ndjson(a.input);
  auto gateway = cfg.make_gateway();

  std::vector<double> schedule = five_run_schedule();
  schedule.resize(a.runs, schedule.back());

  std::vector<json> out_rows(rows.size() * a.runs);
  std::size_t errors = 0;
  std::mutex errors_mutex;
  for (std::size_t r = 0; r < a.runs; ++r) {
    AnnotateOptions opts;
    opts.temperature = schedule[r];
    opts.seed = static_cast<std::int64_t>(cfg.seed + r);
    opts.run_index = r;
    opts.model_tag = cfg.model_tag;
    parallel_for(rows.size(), cfg.gateway.max_in_flight, [&](std::size_t i) {
      const auto id = row_id(rows[i]);
      const auto text = row_text(rows[i]);
      json row;
      if (cascade) {
        try {
          const auto trace = annotate_cascade(id, text, cfg.programs, *gateway, opts);
          row = trace.to_json();
          row["label"] = trace.final_label;
        } catch (const CascadeError& e) {
          row = e.partial().to_json();
          row["label"] = nullptr;
          row["error"] = error_json(e);
        }
      } else {
        row = {{"step", to_string(*step)}};
        try {
          const auto result = annotate(cfg.programs.for_step(*step), text, *gateway, opts);
          row["label"] = result.label;
          row["rationale"] = result.rationale;
        } catch (const Error& e) {
          row["label"] = nullptr;
          row["error"] = error_json(e);
        }
      }
      if (row.contains("error")) {
        std::lock_guard lock(errors_mutex);
        ++errors;
      }
      row["id"] = id;
      row["run_index"] = r;
      out_rows[r * rows.size() + i] = std::move(row);
    });
  }
  write_ndjson(a.out, out_rows);
  *ctx.out << json{{"notes", rows.size()}, {"runs", a.runs}, {"errors", errors}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string preds, golds, labelset = "all", out, table, baseline;
  bool filter = false;
};

struct RunScores {
  std::vector<MetricReport> reports;
  std::vector<double> cascaded;  // empty when the predictions carry no Step 1 label
};

RunScores score_runs(const std::vector<json>& pred_rows, const std::vector<std::pair<std::string, std::string>>& golds,
                     const std::vector<std::string>& labelset, bool binary) {
  std::map<std::size_t, std::map<std::string, json>> by_run;
  for (const auto& row : pred_rows) {
    by_run[row.value("run_index", std::size_t{0})][row_id(row)] = row;
  }
  if (by_run.empty()) throw Error(ErrorCode::InvalidArgument, "prediction file is empty");
  RunScores scores;
  bool cascaded = !binary;
  for (const auto& [run, preds] : by_run) {
    std::vector<std::string> g, p;
    std::size_t correct = 0;
    for (const auto& [id, gold] : golds) {
      g.push_back(binary ? binary_gold(gold) : gold);
      auto it = preds.find(id);
      p.push_back(it == preds.end() ? "" : pred_token(it->second, binary));
      if (it == preds.end() || !it->second.contains("step1_label")) {
        cascaded = false;
        continue;
      }
      const auto& row = it->second;
      const std::string step1 = row["step1_label"].is_string() ? row["step1_label"].get<std::string>() : "";
      std::optional<std::string> second;
      if (row.contains("second_step") && !row["second_step"].is_null() && row["label"].is_string()) {
        second = row["label"].get<std::string>();
      }
      std::optional<std::string_view> second_view;
      if (second) second_view = *second;
      if (cascaded_correct(step1, second_view, binary_gold(gold), gold)) ++correct;
    }
    scores.reports.push_back(make_report(confusion_matrix(g, p, labelset)));
    scores.cascaded.push_back(golds.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(golds.size()));
  }
  if (!cascaded) scores.cascaded.clear();
  return scores;
}

int cmd_evaluate(const Context& ctx, const EvaluateArgs& a) {
  const auto labelset = labelset_tokens(a.labelset);
  const bool binary = a.labelset == "binary";
  const std::set<std::string> allowed(labelset.begin(), labelset.end());

  std::vector<std::pair<std::string, std::string>> golds;
  std::set<std::string> gold_ids;
  for (const auto& row : read_ndjson(a.golds)) {
    const auto id = row_id(row);
    auto label = row.at("label").get<std::string>();
    if (a.filter && !allowed.count(binary ? binary_gold(label) : label)) continue;
    if (!gold_ids.insert(id).second) throw Error(ErrorCode::InvalidArgument, "duplicate gold id '" + id + "'");
    golds.emplace_back(id, std::move(label));
  }

  const auto ours = score_runs(read_ndjson(a.preds), golds, labelset, binary);
  json report;
  std::string table;
  if (ours.reports.size() == 1) {
    report = to_json(ours.reports.front());
    if (!ours.cascaded.empty()) report["cascaded_accuracy"] = ours.cascaded.front();
    table = render_table(ours.reports.front());
  } else {
    auto multi = make_multi_run_report(ours.reports);
    if (!ours.cascaded.empty()) multi.cascaded_accuracy = ci95(ours.cascaded);
    report = to_json(multi);
    table = render_table(multi);
  }
  report["labelset"] = a.labelset;

  if (!a.baseline.empty()) {
    const auto base = score_runs(read_ndjson(a.baseline), golds, labelset, binary);
    std::vector<double> x, y;
    for (const auto& r : ours.reports) x.push_back(r.macro_f1);
    for (const auto& r : base.reports) y.push_back(r.macro_f1);
    const double p = compare_to_baseline(x, y);
    report["baseline_comparison"] = {
        {"metric", "macro_f1"}, {"test", "welch_t"}, {"p_value", p}, {"significant", p < 0.05}};
    table += "Welch t-test vs baseline (macro-F1): p = " + std::to_string(p) + (p < 0.05 ? " *" : "") + "\n";
  }

  write_text_file(a.out, report.dump(2) + "\n");
  if (!a.table.empty()) write_text_file(a.table, table);
  *ctx.out << table;
  return 0;
}

// ---------------------------------------------------------------------------
// export

struct ExportArgs {
  std::string records, out, manifest, real, split;
  bool sft = false, with_reasoning = false;
  double real_fraction = 0.0;
  std::size_t target = 0;
  std::optional<std::uint64_t> seed;
};

int cmd_export(const Context& ctx, const ExportArgs& a) {
  auto records = load_records(a.records);
  if (!a.split.empty()) {
    const auto split = parse_split(a.split);
    std::erase_if(records, [&](const Record& r) { return r.split != split; });
  }
  if (!a.real.empty()) {
    if (a.target == 0) throw Error(ErrorCode::InvalidArgument, "--target is required with --real");
    records = mix_composition(records, load_records(a.real), a.real_fraction, a.target, a.seed.value_or(0));
  }
  std::vector<json> rows;
  if (a.sft) {
    rows = export_sft(records, a.with_reasoning);
  } else {
    if (a.with_reasoning) throw Error(ErrorCode::InvalidArgument, "--with-reasoning requires --sft");
    for (const auto& r : records) rows.push_back(to_json(r));
  }
  write_ndjson(a.out, rows);
  const auto manifest = make_manifest(records, a.with_reasoning, a.seed, build_split_plan().digest());
  if (!a.manifest.empty()) write_text_file(a.manifest, manifest.to_json().dump(2) + "\n");
  *ctx.out << manifest.to_json().dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string records;
  bool plan = false, as_json = false;
  int devset_per_label = 12;
};

int cmd_stats(const Context& ctx, const StatsArgs& a) {
  if (a.devset_per_label != 12 && a.devset_per_label != 48) {
    throw Error(ErrorCode::InvalidArgument, "--devset-per-label must be 12 or 48");
  }
  const auto preset = a.devset_per_label == 48 ? DevsetPreset::PerLabel48 : DevsetPreset::PerLabel12;
  if (a.plan == !a.records.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --plan or --records");
  }
  if (a.plan) {
    const auto plan = build_split_plan({}, preset);
    if (a.as_json) {
      *ctx.out << json{{"plan", plan.to_json()}, {"digest", plan.digest()}}.dump(2) << "\n";
    } else {
      *ctx.out << render_plan(plan);
    }
    return 0;
  }
  const auto table = stats(load_records(a.records));
  if (a.as_json) {
    *ctx.out << json{{"counts", table.as_plan().to_json()},
                     {"unique_records", table.unique_records},
                     {"duplicate_ids", table.duplicate_ids}}
                    .dump(2)
             << "\n";
  } else {
    *ctx.out << table.render();
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sdoh: synthetic SDoH note augmentation, annotation and evaluation pipeline"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all commands");
  Context ctx;
  ctx.out = &out;
  app.add_option("-c,--config", ctx.config_path, "Pipeline configuration file (JSON)");

  std::function<int()> action;

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Extract social-history sections into a raw-note pool");
  c_ingest->add_option("--input", ingest.input, "NDJSON of {id, text, source}")->required();
  c_ingest->add_option("--out", ingest.out, "Pool file to write")->required();
  c_ingest->add_option("--scan", ingest.scan, "Write per-note keyword hits here");
  c_ingest->add_flag("--keep-all", ingest.keep_all, "Keep notes without a social-history section");
  c_ingest->add_flag("--require-keyword", ingest.require_keyword, "Keep only notes with a keyword hit");
  c_ingest->callback([&] { action = [&] { return cmd_ingest(ctx, ingest); }; });

  AugmentArgs augment;
  auto* c_augment = app.add_subcommand("augment", "Generate an augmentation batch for one label");
  c_augment->add_option("--label", augment.label, "Target label token")->required();
  c_augment->add_option("--pool", augment.pool, "Raw-note pool file")->required();
  c_augment->add_option("--pool-out", augment.pool_out, "Where to write the updated pool (default: --pool)");
  c_augment->add_option("--batch", augment.batch, "Batch size (default from config)");
  c_augment->add_option("--out", augment.out, "Batch file to write")->required();
  c_augment->add_option("--prompt", augment.prompt, "Initial augmentation prompt file");
  c_augment->add_option("--verdicts", augment.verdicts,
                        "NDJSON of {item_id, passed, feedback}; runs the full review loop");
  c_augment->add_option("--accepted", augment.accepted, "Accepted notes output (with --verdicts)");
  c_augment->add_option("--state", augment.state, "Final augmenter state output (with --verdicts)");
  c_augment->callback([&] { action = [&] { return cmd_augment(ctx, augment); }; });

  ReviewServeArgs serve;
  auto* c_serve = app.add_subcommand("review-serve", "Serve the review API for one label's augmentation loop");
  c_serve->add_option("--label", serve.label, "Target label token")->required();
  c_serve->add_option("--pool", serve.pool, "Raw-note pool file")->required();
  c_serve->add_option("--pool-out", serve.pool_out, "Where to write the updated pool (default: --pool)");
  c_serve->add_option("--out-dir", serve.out_dir, "Directory for batches, state and accepted notes")->required();
  c_serve->add_option("--batch", serve.batch, "Batch size (default from config)");
  c_serve->add_option("--prompt", serve.prompt, "Initial augmentation prompt file");
  c_serve->add_option("--host", serve.host, "Bind address");
  c_serve->add_option("--port", serve.port, "Port (0 picks a free one)");
  c_serve->callback([&] { action = [&] { return cmd_review_serve(ctx, serve); }; });

  ValidateArgs validate;
  auto* c_validate = app.add_subcommand("validate", "Quality-control accepted notes into dataset records");
  c_validate->add_option("--accepted", validate.accepted, "Accepted notes from augment")->required();
  c_validate->add_option("--pool", validate.pool, "Raw-note pool file")->required();
  c_validate->add_option("--pool-out", validate.pool_out, "Where to write the updated pool (default: --pool)");
  c_validate->add_option("--out", validate.out, "Records file to write")->required();
  c_validate->add_option("--decisions", validate.decisions, "Per-example decision log");
  c_validate->add_option("--split", validate.split, "Split for written records");
  c_validate->add_option("--source", validate.source, "Source for written records");
  c_validate->callback([&] { action = [&] { return cmd_validate(ctx, validate); }; });

  OptimizeArgs opt;
  auto* c_opt = app.add_subcommand("optimize", "Search demonstrations for one annotation step");
  c_opt->add_option("--step", opt.step, "binary | eviction | non_eviction")->required();
  c_opt->add_option("--train", opt.train, "NDJSON of {text, label, rationale?}")->required();
  c_opt->add_option("--dev", opt.dev, "NDJSON of {text, label}")->required();
  c_opt->add_option("--out", opt.out, "Program file to write")->required();
  c_opt->add_option("--candidates", opt.candidates, "Number of candidate programs");
  c_opt->add_option("--max-demos", opt.max_demos, "Demonstrations per candidate");
  c_opt->add_option("--seed", opt.seed, "Search seed (default from config)");
  c_opt->callback([&] { action = [&] { return cmd_optimize(ctx, opt); }; });

  AnnotateArgs ann;
  auto* c_ann = app.add_subcommand("annotate", "Label notes with the cascade or a single step");
  c_ann->add_option("--input", ann.input, "NDJSON of {id, text}")->required();
  c_ann->add_option("--out", ann.out, "Predictions file to write")->required();
  c_ann->add_option("--mode", ann.mode, "cascade | binary | eviction | non_eviction");
  c_ann->add_option("--runs", ann.runs, "Independent runs (first at temperature 0, rest at 0.5)");
  c_ann->callback([&] { action = [&] { return cmd_annotate(ctx, ann); }; });

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score predictions against gold labels");
  c_ev->add_option("--preds", ev.preds, "Predictions NDJSON")->required();
  c_ev->add_option("--golds", ev.golds, "Gold NDJSON of {id, label}")->required();
  c_ev->add_option("--labelset", ev.labelset, "eviction | non-eviction | binary | all");
  c_ev->add_option("--out", ev.out, "Report file to write")->required();
  c_ev->add_option("--table", ev.table, "Also write the rendered table here");
  c_ev->add_option("--baseline", ev.baseline, "Baseline predictions for a Welch t-test on macro-F1");
  c_ev->add_flag("--filter", ev.filter, "Skip gold rows outside the labelset");
  c_ev->callback([&] { action = [&] { return cmd_evaluate(ctx, ev); }; });

  ExportArgs ex;
  auto* c_ex = app.add_subcommand("export", "Export records, optionally as chat-format SFT data");
  c_ex->add_option("--records", ex.records, "Records NDJSON")->required();
  c_ex->add_option("--out", ex.out, "Output NDJSON")->required();
  c_ex->add_option("--manifest", ex.manifest, "Manifest file to write");
  c_ex->add_option("--split", ex.split, "Only export records of this split");
  c_ex->add_flag("--sft", ex.sft, "Emit system/user/assistant message triples");
  c_ex->add_flag("--with-reasoning", ex.with_reasoning, "Include the rationale in the assistant turn");
  c_ex->add_option("--real", ex.real, "Real-note records to mix in");
  c_ex->add_option("--real-fraction", ex.real_fraction, "Fraction of the target drawn from --real");
  c_ex->add_option("--target", ex.target, "Total size of the mixed set");
  c_ex->add_option("--seed", ex.seed, "Mixing seed");
  c_ex->callback([&] { action = [&] { return cmd_export(ctx, ex); }; });

  StatsArgs st;
  auto* c_st = app.add_subcommand("stats", "Summarize records or the default split plan");
  c_st->add_option("--records", st.records, "Records NDJSON");
  c_st->add_flag("--plan", st.plan, "Show the default split plan");
  c_st->add_option("--devset-per-label", st.devset_per_label, "12 or 48");
  c_st->add_flag("--json", st.as_json, "Emit JSON instead of a table");
  c_st->callback([&] { action = [&] { return cmd_stats(ctx, st); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << json{{"error", {{"code", "UsageError"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << json{{"error", error_json(e)}}.dump() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << json{{"error", {{"code", "InvalidArgument"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}

}  // namespace sdoh
