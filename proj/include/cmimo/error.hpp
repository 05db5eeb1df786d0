#pragma once

#include <stdexcept>
#include <string>

namespace cmimo {

enum class ErrorCode {
  NonFinite,
  ConvergenceFailure,
  NotPSD,
  DimensionMismatch,
  UnsupportedNorm,
  ShapeError,
  DimensionTooLarge,
  ParseError,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Every library failure carries a code so the CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmimo
