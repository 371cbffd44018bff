#include "regkit/error.hpp"

namespace regkit {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::DiscontinuousAtKnot: return "DiscontinuousAtKnot";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PatternViolation: return "PatternViolation";
    case ErrorCode::KeyRangeError: return "KeyRangeError";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NearEigenvalue: return "NearEigenvalue";
    case ErrorCode::WindingMismatch: return "WindingMismatch";
    case ErrorCode::NonSimplePole: return "NonSimplePole";
    case ErrorCode::SingularM0: return "SingularM0";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::SpectrumMismatch: return "SpectrumMismatch";
  }
  return "Unknown";
}

}  // namespace regkit
