// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "sdoh/annotator.hpp"
#include "sdoh/augmenter.hpp"
#include "sdoh/gateway.hpp"
#include "sdoh/ingest.hpp"
#include "sdoh/taxonomy.hpp"

namespace sdoh {

/// Everything a pipeline command needs, resolved from one JSON file.
///
///   {
///     "backend":  {"kind": "offline" | "script" | "http", ...},
///     "cassette": {"path": "c.ndjson", "mode": "record" | "replay_strict" | "replay_fallthrough"},
///     "gateway":  {"max_in_flight": 4, "max_retries": 3, "backoff_ms": [1000, 2000, 4000]},
///     "taxonomy": "taxonomy.json",
///     "keywords": "keywords.json",
///     "programs": {"binary": "b.json", "eviction": "e.json", "non_eviction": "n.json"},
///     "augmenter": {"threshold": 0.9, "max_rounds": 3, "batch_size": 20,
///                   "temperature": 0.7, "prompt": "prompt.txt"},
///     "model_tag": "...",
///     "seed": 0
///   }
///
/// Relative paths resolve against the config file's directory. The "http"
/// backend reads its key from the environment variable named by
/// "api_key_env" (default OPENAI_API_KEY); the key is only required when the
/// backend can actually be reached.
///
/// load() performs all validation and opens the cassette, so a bad config
/// fails before any gateway traffic.
struct PipelineConfig {
  std::filesystem::path base_dir = ".";
  std::shared_ptr<Backend> backend;
  std::shared_ptr<Cassette> cassette;
  GatewayOptions gateway;
  std::shared_ptr<const Taxonomy> taxonomy;
  KeywordTable keywords = KeywordTable::builtin();
  ProgramSet programs;
  AugmenterConfig augmenter;
  std::optional<std::string> augment_prompt;
  std::string model_tag;
  std::uint64_t seed = 0;

  static PipelineConfig defaults();
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

  std::unique_ptr<Gateway> make_gateway() const;
};

/// Reads a program file: either a bare program document or the output of
/// the optimize command.
PromptProgram load_program(const std::filesystem::path& path);

}  // namespace sdoh
