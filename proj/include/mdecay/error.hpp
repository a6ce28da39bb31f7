#pragma once

#include <stdexcept>
#include <string>

namespace mdecay {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  NonFiniteEvaluation,
  PoleOutsideInterval,
  ChannelIndexOutOfRange,
  StableStateUnsupported,
  DivergentZenoIntegral,
  GridTooCoarse,
  DimensionTooLarge,
  ConfigParseError,
  IoError,
  RecurrenceWindowExceeded,
  ConvergenceGateFailed,
};

const char* error_name(ErrorCode code);

// Process exit status used by the command line tool for each error kind.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mdecay
