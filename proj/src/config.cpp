// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/config.hpp"

#include <cstdlib>
#include <set>

#include "sdoh/util.hpp"

namespace sdoh {

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const nlohmann::json& value,
                              const std::string& where) {
  if (!value.is_string()) config_error(where + " must be a path string");
  std::filesystem::path p = value.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
}

std::shared_ptr<Backend> make_backend(const nlohmann::json& spec, const std::filesystem::path& base,
                                      bool reachable) {
  check_keys(spec, {"kind", "rules", "base_url", "path", "model", "auth_style", "api_key_env", "timeout_seconds"},
             "backend");
  const auto kind = spec.value("kind", std::string("offline"));
  if (kind == "offline") return std::make_shared<OfflineBackend>();
  if (kind == "script") {
    if (!spec.contains("rules")) config_error("script backend needs 'rules'");
    return ScriptedBackend::from_json(read_json_file(resolve(base, spec["rules"], "backend.rules")));
  }
  if (kind == "http") {
    OpenAiHttpBackend::Options o;
    o.base_url = spec.value("base_url", std::string("https://api.openai.com"));
    o.path = spec.value("path", o.path);
    o.model = spec.value("model", std::string{});
    o.auth_style = spec.value("auth_style", o.auth_style);
    o.timeout_seconds = spec.value("timeout_seconds", o.timeout_seconds);
    if (o.auth_style != "authorization" && o.auth_style != "api-key") {
      config_error("backend.auth_style must be 'authorization' or 'api-key'");
    }
    if (o.model.empty()) config_error("http backend needs 'model'");
    const auto env = spec.value("api_key_env", std::string("OPENAI_API_KEY"));
    if (const char* key = std::getenv(env.c_str()); key && *key) o.api_key = key;
    if (reachable && o.api_key.empty()) config_error("environment variable " + env + " is not set");
    return std::make_shared<OpenAiHttpBackend>(std::move(o));
  }
  config_error("unknown backend kind '" + kind + "'");
}

}  // namespace

PromptProgram load_program(const std::filesystem::path& path) {
  auto doc = read_json_file(path);
  if (doc.contains("format")) {
    if (doc["format"] != "sdoh.program.v1") config_error(path.string() + ": unsupported program format");
    doc = doc.at("program");
  }
  try {
    auto program = PromptProgram::from_json(doc);
    program.validate();
    return program;
  } catch (const nlohmann::json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  c.backend = std::make_shared<OfflineBackend>();
  c.taxonomy = std::shared_ptr<const Taxonomy>(&Taxonomy::builtin(), [](const Taxonomy*) {});
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) config_error("config file not found: " + path.string());
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return from_json(read_json_file(path), base);
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc, const std::filesystem::path& base) {
  check_keys(doc,
             {"backend", "cassette", "gateway", "taxonomy", "keywords", "programs", "augmenter", "model_tag",
              "seed"},
             "config");
  auto c = defaults();
  c.base_dir = base;
  try {
    c.model_tag = doc.value("model_tag", std::string{});
    c.seed = doc.value("seed", std::uint64_t{0});

    std::optional<CassetteMode> mode;
    std::optional<std::filesystem::path> cassette_path;
    if (doc.contains("cassette")) {
      const auto& cs = doc["cassette"];
      check_keys(cs, {"path", "mode"}, "cassette");
      if (!cs.contains("path")) config_error("cassette needs 'path'");
      cassette_path = resolve(base, cs["path"], "cassette.path");
      try {
        mode = parse_cassette_mode(cs.value("mode", std::string("replay_strict")));
      } catch (const Error& e) {
        config_error(e.what());
      }
    }
    const bool reachable = !mode || *mode != CassetteMode::ReplayStrict;
    c.backend = make_backend(doc.value("backend", nlohmann::json::object()), base, reachable);

    if (doc.contains("gateway")) {
      const auto& g = doc["gateway"];
      check_keys(g, {"max_in_flight", "max_retries", "backoff_ms"}, "gateway");
      c.gateway.max_in_flight = g.value("max_in_flight", c.gateway.max_in_flight);
      c.gateway.max_retries = g.value("max_retries", c.gateway.max_retries);
      if (c.gateway.max_in_flight == 0) config_error("gateway.max_in_flight must be positive");
      if (c.gateway.max_retries < 0) config_error("gateway.max_retries must be non-negative");
      if (g.contains("backoff_ms")) {
        c.gateway.backoff.clear();
        for (const auto& ms : g["backoff_ms"]) c.gateway.backoff.emplace_back(ms.get<std::int64_t>());
      }
    }

    if (doc.contains("taxonomy")) {
      c.taxonomy = std::make_shared<const Taxonomy>(
          Taxonomy::from_json(read_json_file(resolve(base, doc["taxonomy"], "taxonomy"))));
    }
    if (doc.contains("keywords")) {
      c.keywords = KeywordTable::from_json(read_json_file(resolve(base, doc["keywords"], "keywords")));
    }
    if (doc.contains("programs")) {
      const auto& p = doc["programs"];
      check_keys(p, {"binary", "eviction", "non_eviction"}, "programs");
      const std::pair<const char*, PromptProgram*> slots[] = {
          {"binary", &c.programs.binary}, {"eviction", &c.programs.eviction},
          {"non_eviction", &c.programs.non_eviction}};
      for (const auto& [key, slot] : slots) {
        if (!p.contains(key)) continue;
        auto program = load_program(resolve(base, p[key], std::string("programs.") + key));
        if (to_string(program.signature.step) != key) {
          config_error(std::string("programs.") + key + " holds a program for another step");
        }
        *slot = std::move(program);
      }
    }
    if (doc.contains("augmenter")) {
      const auto& a = doc["augmenter"];
      check_keys(a, {"threshold", "max_rounds", "batch_size", "temperature", "prompt"}, "augmenter");
      c.augmenter.threshold = a.value("threshold", c.augmenter.threshold);
      c.augmenter.max_rounds = a.value("max_rounds", c.augmenter.max_rounds);
      c.augmenter.batch_size = a.value("batch_size", c.augmenter.batch_size);
      c.augmenter.temperature = a.value("temperature", c.augmenter.temperature);
      if (c.augmenter.threshold < 0.0 || c.augmenter.threshold > 1.0) {
        config_error("augmenter.threshold must lie in [0, 1]");
      }
      if (c.augmenter.max_rounds == 0 || c.augmenter.batch_size == 0) {
        config_error("augmenter.max_rounds and augmenter.batch_size must be positive");
      }
      if (a.contains("prompt")) {
        c.augment_prompt = read_text_file(resolve(base, a["prompt"], "augmenter.prompt"));
        if (!has_augment_placeholders(*c.augment_prompt)) {
          config_error("augmenter.prompt lacks {raw_notes}, {label} or {definition}");
        }
      }
    }
    c.augmenter.model_tag = c.model_tag;

    if (cassette_path) c.cassette = Cassette::open(*cassette_path, *mode);
  } catch (const nlohmann::json::exception& e) {
    config_error(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(e.what());
  }
  return c;
}

std::unique_ptr<Gateway> PipelineConfig::make_gateway() const {
  return std::make_unique<Gateway>(backend, cassette, gateway);
}

}  // namespace sdoh
