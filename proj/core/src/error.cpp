// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/error.hpp"

namespace promptalign {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownKeyPoint: return "UnknownKeyPoint";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kUnsupportedKeyPoint: return "UnsupportedKeyPoint";
    case ErrorCode::kEmptyVerdicts: return "EmptyVerdicts";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kMalformedJudgment: return "MalformedJudgment";
    case ErrorCode::kMalformedTeacherOutput: return "MalformedTeacherOutput";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kIncompleteSelection: return "IncompleteSelection";
    case ErrorCode::kKeypointSetMismatch: return "KeypointSetMismatch";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kGroupAborted: return "GroupAborted";
    case ErrorCode::kBindError: return "BindError";
    case ErrorCode::kStoreCorruption: return "StoreCorruption";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kNotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace promptalign
