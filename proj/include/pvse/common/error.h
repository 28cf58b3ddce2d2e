// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_COMMON_ERROR_H_
#define PVSE_COMMON_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pvse {

enum class ErrorCode {
  kInvalidArgument,
  kIoFailure,
  kMalformedFile,
  kUnsupportedEncoding,
  kEmptySignal,
  kDegenerateNormalization,
  kSilentInput,
  kEmptyDirectory,
  kEmptyManifest,
  kShapeMismatch,
  kGraphNotRecorded,
  kMissingFrame,
  kMalformedImage,
  kNoCheckpoint,
  kLengthMismatch,
  kTooShort,
  kSilentReference,
  kNoValidFrames,
  kInvalidConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace internal {

template <typename... Args>
[[noreturn]] void Throw(ErrorCode code, const Args &...args) {
  std::ostringstream oss;
  (oss << ... << args);
  throw Error(code, oss.str());
}

}  // namespace internal
}  // namespace pvse

#define PVSE_THROW(code, ...) ::pvse::internal::Throw(::pvse::ErrorCode::code, __VA_ARGS__)

#define PVSE_CHECK(cond, code, ...)                                  \
  do {                                                               \
    if (!(cond)) ::pvse::internal::Throw(::pvse::ErrorCode::code, __VA_ARGS__); \
  } while (0)

#endif  // PVSE_COMMON_ERROR_H_
