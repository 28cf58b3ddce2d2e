// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/common/error.h"

namespace pvse {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kEmptySignal: return "EmptySignal";
    case ErrorCode::kDegenerateNormalization: return "DegenerateNormalization";
    case ErrorCode::kSilentInput: return "SilentInput";
    case ErrorCode::kEmptyDirectory: return "EmptyDirectory";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kGraphNotRecorded: return "GraphNotRecorded";
    case ErrorCode::kMissingFrame: return "MissingFrame";
    case ErrorCode::kMalformedImage: return "MalformedImage";
    case ErrorCode::kNoCheckpoint: return "NoCheckpoint";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kSilentReference: return "SilentReference";
    case ErrorCode::kNoValidFrames: return "NoValidFrames";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace pvse
