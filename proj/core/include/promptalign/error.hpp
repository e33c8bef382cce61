// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace promptalign {

enum class ErrorCode {
  kUnknownKeyPoint,
  kIoError,
  kSchemaViolation,
  kUnsupportedKeyPoint,
  kEmptyVerdicts,
  kTransportError,
  kRateLimited,
  kMalformedJudgment,
  kMalformedTeacherOutput,
  kGroupTooSmall,
  kSupportMismatch,
  kShapeMismatch,
  kEmptyCorpus,
  kIncompleteSelection,
  kKeypointSetMismatch,
  kUnsupportedFormat,
  kInvalidArgument,
  kInvalidConfig,
  kGroupAborted,
  kBindError,
  kStoreCorruption,
  kConflict,
  kNotFound,
};

std::string_view ErrorCodeName(ErrorCode code);

// All domain failures surface as this type; `code()` is stable and
// machine-parseable (see ErrorCodeName).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Transport failures carry whether another attempt may succeed.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool retryable, int status = 0)
      : Error(ErrorCode::kTransportError, message),
        retryable_(retryable),
        status_(status) {}

  bool retryable() const noexcept { return retryable_; }
  int status() const noexcept { return status_; }

 private:
  bool retryable_;
  int status_;
};

}  // namespace promptalign
