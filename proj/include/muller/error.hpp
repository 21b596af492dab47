#pragma once

#include <stdexcept>
#include <string>

namespace muller {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Format,
  Range,
  Dimension,
  Unsupported,
};

/// Exception type thrown by every operation in the library. The C API maps
/// the code onto a muller_status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace muller
