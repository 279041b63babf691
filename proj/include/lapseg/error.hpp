#pragma once

#include <stdexcept>
#include <string>

namespace lapseg {

enum class ErrorCode {
  kDecode,
  kUnsupportedFormat,
  kTooSmall,
  kDimension,
  kTooManyClasses,
  kInsufficientData,
  kParameter,
  kMissingSeeds,
  kFormat,
  kUndefinedMetric,
  kIo,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers switch on code() when the
// kind matters (the CLI maps everything to exit code 2, the service maps codes
// to HTTP statuses).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lapseg
