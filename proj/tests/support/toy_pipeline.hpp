// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdoh/cli.hpp"

namespace sdoh::testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult cli(const std::vector<std::string>& args) {
  std::vector<std::string> owned = {"sdoh"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Files written by run_toy_pipeline, relative to the work directory.
inline const std::vector<std::string>& toy_outputs() {
  static const std::vector<std::string> files = {
      "pool.ndjson",    "scan.ndjson",      "batches.ndjson", "accepted.ndjson",   "state.json",
      "records.ndjson", "decisions.ndjson", "preds.ndjson",   "report.json",       "report.txt",
      "sft.ndjson",     "manifest.json"};
  return files;
}

/// ingest -> augment (scripted verdicts) -> validate -> annotate (2 runs)
/// -> evaluate -> export over the bundled toy corpus. Returns the first
/// failing step, or an empty result with code 0.
inline CliResult run_toy_pipeline(const std::filesystem::path& config, const std::filesystem::path& data,
                                  const std::filesystem::path& work) {
  const auto d = [&](const char* f) { return (data / f).string(); };
  const auto w = [&](const char* f) { return (work / f).string(); };
  const auto c = config.string();
  const std::vector<std::vector<std::string>> steps = {
      {"-c", c, "ingest", "--input", d("raw_notes.ndjson"), "--out", w("pool.ndjson"), "--scan",
       w("scan.ndjson")},
      {"-c", c, "augment", "--label", "t3_Eviction_pending", "--pool", w("pool.ndjson"), "--out",
       w("batches.ndjson"), "--verdicts", d("verdicts.ndjson"), "--accepted", w("accepted.ndjson"),
       "--state", w("state.json")},
      {"-c", c, "validate", "--accepted", w("accepted.ndjson"), "--pool", w("pool.ndjson"), "--out",
       w("records.ndjson"), "--decisions", w("decisions.ndjson")},
      {"-c", c, "annotate", "--input", d("test_notes.ndjson"), "--out", w("preds.ndjson"), "--runs", "2"},
      {"-c", c, "evaluate", "--preds", w("preds.ndjson"), "--golds", d("gold.ndjson"), "--out",
       w("report.json"), "--table", w("report.txt")},
      {"-c", c, "export", "--records", w("records.ndjson"), "--out", w("sft.ndjson"), "--sft",
       "--with-reasoning", "--manifest", w("manifest.json")},
  };
  for (const auto& args : steps) {
    auto r = cli(args);
    if (r.code != 0) return r;
  }
  return {};
}

}  // namespace sdoh::testing
