#include "chiarella/error.hpp"

namespace chiarella {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoStationaryDistribution: return "NoStationaryDistribution";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorCode::NoGaussianDensity: return "NoGaussianDensity";
    case ErrorCode::NoBarrier: return "NoBarrier";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace chiarella
