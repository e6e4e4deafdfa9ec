#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chiarella {

enum class ErrorCode {
  InvalidParameter,
  DivisionByZero,
  NonFinite,
  NoStationaryDistribution,
  SingularCovariance,
  QuadratureFailure,
  BracketFailure,
  UnsupportedRegime,
  NoGaussianDensity,
  NoBarrier,
  EmptyInput,
  InsufficientData,
  SupportMismatch,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every failure the library signals; callers
/// branch on code() rather than on the dynamic type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chiarella
