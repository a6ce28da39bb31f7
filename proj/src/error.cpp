#include "mdecay/error.hpp"

namespace mdecay {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::PoleOutsideInterval: return "PoleOutsideInterval";
    case ErrorCode::ChannelIndexOutOfRange: return "ChannelIndexOutOfRange";
    case ErrorCode::StableStateUnsupported: return "StableStateUnsupported";
    case ErrorCode::DivergentZenoIntegral: return "DivergentZenoIntegral";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::RecurrenceWindowExceeded: return "RecurrenceWindowExceeded";
    case ErrorCode::ConvergenceGateFailed: return "ConvergenceGateFailed";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return 2;
    case ErrorCode::ConfigParseError: return 3;
    case ErrorCode::IoError: return 4;
    case ErrorCode::NonConvergence: return 10;
    case ErrorCode::NonFiniteEvaluation: return 11;
    case ErrorCode::PoleOutsideInterval: return 12;
    case ErrorCode::ChannelIndexOutOfRange: return 13;
    case ErrorCode::StableStateUnsupported: return 14;
    case ErrorCode::DivergentZenoIntegral: return 15;
    case ErrorCode::GridTooCoarse: return 16;
    case ErrorCode::DimensionTooLarge: return 17;
    case ErrorCode::RecurrenceWindowExceeded: return 18;
    case ErrorCode::ConvergenceGateFailed: return 19;
  }
  return 1;
}

}  // namespace mdecay
