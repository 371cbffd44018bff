#pragma once

#include <stdexcept>
#include <string>

namespace regkit {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  DiscontinuousAtKnot,
  IndexOutOfRange,
  PatternViolation,
  KeyRangeError,
  SingularBasis,
  StepUnderflow,
  NearEigenvalue,
  WindingMismatch,
  NonSimplePole,
  SingularM0,
  SignatureMismatch,
  SpectrumMismatch,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C interface and the CLI can map it to a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace regkit
