#include "slider/errors.hpp"

namespace slider {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::TooCoarse: return "TooCoarse";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::BoxOutsideDomain: return "BoxOutsideDomain";
    case ErrorCode::BoxUnresolved: return "BoxUnresolved";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::NonPositiveClearance: return "NonPositiveClearance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::InadmissibleShape: return "InadmissibleShape";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace slider
