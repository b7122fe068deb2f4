// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/annotator.hpp"

#include <sstream>

#include "sdoh/util.hpp"

namespace sdoh {
namespace {

struct TokenHit {
  std::string token;
  std::size_t end = 0;  // offset one past the match
};

// Last word-bounded occurrence of any legal token in `text`.
std::optional<TokenHit> last_legal_token(std::string_view text,
                                         const std::vector<std::string>& legal) {
  std::optional<TokenHit> best;
  for (const auto& token : legal) {
    for (auto pos = text.rfind(token); pos != std::string_view::npos;
         pos = pos == 0 ? std::string_view::npos : text.rfind(token, pos - 1)) {
      const auto end = pos + token.size();
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      const bool right_ok = end >= text.size() || !is_word_char(text[end]);
      if (left_ok && right_ok) {
        if (!best || end > best->end) best = TokenHit{token, end};
        break;
      }
    }
  }
  return best;
}

struct KeyedLine {
  std::size_t line_begin;
  std::size_t value_begin;
  std::size_t line_end;
};

// Lines of the form `<key>:` where key matches one of `keys`
// case-insensitively, ignoring leading whitespace and markdown emphasis.
std::vector<KeyedLine> find_keyed_lines(std::string_view text,
                                        std::initializer_list<std::string_view> keys) {
  std::vector<KeyedLine> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    std::size_t p = pos;
    while (p < end && (text[p] == ' ' || text[p] == '\t' || text[p] == '*' || text[p] == '#')) ++p;
    const auto colon = text.find(':', p);
    if (colon != std::string_view::npos && colon < end) {
      std::string key = to_lower(trim(text.substr(p, colon - p)));
      while (!key.empty() && key.back() == '*') key.pop_back();
      for (auto k : keys) {
        if (key == k) {
          std::size_t v = colon + 1;
          while (v < end && (text[v] == ' ' || text[v] == '\t' || text[v] == '*')) ++v;
          out.push_back({pos, v, end});
          break;
        }
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::string_view rstrip(std::string_view s) {
  const auto last = s.find_last_not_of(" \t\r\n");
  return last == std::string_view::npos ? s.substr(0, 0) : s.substr(0, last + 1);
}

std::string output_format(const PromptProgram& program) {
  std::ostringstream out;
  const auto& tokens = legal_tokens(program.signature.step);
  out << "Follow the following format.\n\n"
      << "Note: ${" << program.signature.input_field << "}\n";
  if (program.chain_of_thought) {
    out << "Reasoning: Let's think step by step in order to produce the "
        << program.signature.output_field << ". We ...\n";
  }
  out << "Label: ${" << program.signature.output_field << "}, exactly one of: ";
  for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? ", " : "") << tokens[i];
  return out.str();
}

std::string demo_answer(const Demo& demo, bool chain_of_thought) {
  if (chain_of_thought && !demo.rationale.empty()) {
    return "Reasoning: " + demo.rationale + "\nLabel: " + demo.label;
  }
  return "Label: " + demo.label;
}

void require_step(const PromptProgram& program, Step step) {
  if (program.signature.step != step) {
    throw Error(ErrorCode::InvalidArgument,
                "program signature is for step " + std::string(to_string(program.signature.step)) +
                    ", expected " + std::string(to_string(step)));
  }
}

}  // namespace

ParsedAnnotation parse_annotation_output(std::string_view raw,
                                         const std::vector<std::string>& legal_labels) {
  const auto label_lines = find_keyed_lines(raw, {"label", "answer", "sdoh annotation"});
  for (auto it = label_lines.rbegin(); it != label_lines.rend(); ++it) {
    const auto value = raw.substr(it->value_begin, it->line_end - it->value_begin);
    auto hit = last_legal_token(value, legal_labels);
    if (!hit) continue;

    std::string rationale;
    const auto reasoning = find_keyed_lines(raw.substr(0, it->line_begin), {"reasoning", "rationale"});
    if (!reasoning.empty()) {
      const auto& r = reasoning.front();
      rationale = std::string(rstrip(raw.substr(r.value_begin, it->line_begin - r.value_begin)));
    } else {
      rationale = std::string(rstrip(raw.substr(0, it->line_begin)));
    }
    if (rationale.empty()) rationale = std::string(raw);
    return {hit->token, std::move(rationale)};
  }

  if (auto hit = last_legal_token(raw, legal_labels)) return {hit->token, std::string(raw)};
  throw Error(ErrorCode::UnparseableOutput,
              "no legal label in model output: '" + std::string(raw.substr(0, 200)) + "'");
}

std::vector<ChatMessage> render_messages(const PromptProgram& program, std::string_view note) {
  std::vector<ChatMessage> messages;
  messages.push_back({"system", program.instruction + "\n\n" + output_format(program)});
  for (const auto& demo : program.demos) {
    messages.push_back({"user", "Note: " + demo.note});
    messages.push_back({"assistant", demo_answer(demo, program.chain_of_thought)});
  }
  messages.push_back({"user", "Note: " + std::string(note)});
  return messages;
}

AnnotationResult annotate(const PromptProgram& program, std::string_view note, Gateway& gateway,
                          const AnnotateOptions& options) {
  const auto& legal = legal_tokens(program.signature.step);
  CompletionRequest request;
  request.messages = render_messages(program, note);
  request.temperature = options.temperature;
  request.seed = options.seed;
  request.max_tokens = options.max_tokens;
  request.model_tag = options.model_tag;

  AnnotationResult result;
  result.step = program.signature.step;
  result.run_index = options.run_index;
  result.raw_output = gateway.complete(request);
  try {
    auto parsed = parse_annotation_output(result.raw_output, legal);
    result.label = std::move(parsed.label);
    result.rationale = std::move(parsed.rationale);
    return result;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnparseableOutput) throw;
  }

  std::string reprompt = "Your previous answer did not contain a valid label. Reply with the line "
                         "'Label: <label>' using exactly one of: ";
  for (std::size_t i = 0; i < legal.size(); ++i) reprompt += (i ? ", " : "") + legal[i];
  request.messages.push_back({"assistant", result.raw_output});
  request.messages.push_back({"user", reprompt});
  result.raw_output = gateway.complete(request);
  auto parsed = parse_annotation_output(result.raw_output, legal);
  result.label = std::move(parsed.label);
  result.rationale = std::move(parsed.rationale);
  return result;
}

AnnotationResult annotate_binary(std::string_view note, const PromptProgram& program,
                                 Gateway& gateway, const AnnotateOptions& options) {
  require_step(program, Step::Binary);
  return annotate(program, note, gateway, options);
}

AnnotationResult annotate_eviction(std::string_view note, const PromptProgram& program,
                                   Gateway& gateway, const AnnotateOptions& options) {
  require_step(program, Step::Eviction);
  return annotate(program, note, gateway, options);
}

AnnotationResult annotate_non_eviction(std::string_view note, const PromptProgram& program,
                                       Gateway& gateway, const AnnotateOptions& options) {
  require_step(program, Step::NonEviction);
  return annotate(program, note, gateway, options);
}

const PromptProgram& ProgramSet::for_step(Step step) const {
  switch (step) {
    case Step::Binary: return binary;
    case Step::Eviction: return eviction;
    case Step::NonEviction: return non_eviction;
  }
  return binary;
}

std::string ProgramSet::version_tag() const {
  return "b" + std::to_string(binary.version) + ".e" + std::to_string(eviction.version) + ".n" +
         std::to_string(non_eviction.version);
}

nlohmann::json CascadeTrace::to_json() const {
  return {{"note_id", note_id},
          {"step1_label", step1 ? nlohmann::json(step1->label) : nlohmann::json()},
          {"step1_rationale", step1 ? nlohmann::json(step1->rationale) : nlohmann::json()},
          {"second_step", second ? nlohmann::json(to_string(second->step)) : nlohmann::json()},
          {"final_label", final_label},
          {"final_rationale", second ? nlohmann::json(second->rationale) : nlohmann::json()},
          {"run_index", step1 ? step1->run_index : 0},
          {"program_version", program_version}};
}

CascadeTrace annotate_cascade(std::string_view note_id, std::string_view note,
                              const ProgramSet& programs, Gateway& gateway,
                              const AnnotateOptions& options) {
  CascadeTrace trace;
  trace.note_id = note_id;
  trace.program_version = programs.version_tag();
  try {
    trace.step1 = annotate_binary(note, programs.binary, gateway, options);
  } catch (const Error& e) {
    throw CascadeError(e, trace);
  }
  try {
    if (trace.step1->label == "Yes") {
      trace.second = annotate_eviction(note, programs.eviction, gateway, options);
    } else {
      trace.second = annotate_non_eviction(note, programs.non_eviction, gateway, options);
    }
  } catch (const Error& e) {
    throw CascadeError(e, trace);
  }
  trace.final_label = trace.second->label;
  return trace;
}

}  // namespace sdoh
