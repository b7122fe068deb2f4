// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdoh {

enum class ErrorCode {
  InvalidArgument,
  InvalidLabel,
  MissingDefinition,
  ConfigError,
  IoError,
  // ingest
  PoolExhausted,
  InvalidState,
  UnknownNote,
  // gateway
  ProviderError,
  CassetteMiss,
  Timeout,
  // augmenter
  EmptyRawNote,
  UnknownItem,
  AlreadyVerdicted,
  MissingFeedback,
  IncompleteVerdicts,
  InvalidRevision,
  ThresholdNotReached,
  // annotator / optimizer
  UnparseableOutput,
  EmptyCandidatePool,
  // metrics
  LengthMismatch,
  UnknownGoldLabel,
  EmptyMatrix,
  TooFewRuns,
  // dataset
  NegativeCount,
  InsufficientRealRecords,
  MissingRationale,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sdoh
