// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sdoh {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
/// Lowercases and collapses every whitespace run to a single space.
std::string normalize_whitespace_lower(std::string_view text);
bool is_word_char(char c);

/// Reads one JSON object per non-blank line. Throws Error(IoError) with the
/// offending line number on malformed input.
std::vector<nlohmann::json> read_ndjson(const std::filesystem::path& path);
void write_ndjson(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Seeded generator whose output sequence is fixed by the C++ standard,
/// so sampling is reproducible across standard library implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound) by rejection sampling.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Runs `body(i)` for i in [0, count) on at most `max_workers` threads.
/// Exceptions are captured per index and the first (lowest index) rethrown
/// after all work finishes.
void parallel_for(std::size_t count, std::size_t max_workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace sdoh
