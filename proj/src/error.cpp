// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdoh/error.hpp"

namespace sdoh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::MissingDefinition: return "MissingDefinition";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::UnknownNote: return "UnknownNote";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::CassetteMiss: return "CassetteMiss";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::EmptyRawNote: return "EmptyRawNote";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::AlreadyVerdicted: return "AlreadyVerdicted";
    case ErrorCode::MissingFeedback: return "MissingFeedback";
    case ErrorCode::IncompleteVerdicts: return "IncompleteVerdicts";
    case ErrorCode::InvalidRevision: return "InvalidRevision";
    case ErrorCode::ThresholdNotReached: return "ThresholdNotReached";
    case ErrorCode::UnparseableOutput: return "UnparseableOutput";
    case ErrorCode::EmptyCandidatePool: return "EmptyCandidatePool";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownGoldLabel: return "UnknownGoldLabel";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::TooFewRuns: return "TooFewRuns";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::InsufficientRealRecords: return "InsufficientRealRecords";
    case ErrorCode::MissingRationale: return "MissingRationale";
  }
  return "Unknown";
}

}  // namespace sdoh
