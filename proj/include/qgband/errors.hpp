#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace qgband {

enum class ErrorCode {
  NonPositiveLength,
  CouplingOrderViolated,
  UnknownVertex,
  WrongDegree,
  LambdaOutOfRange,
  ScanResolutionTooCoarse,
  NotAnEigenvalue,
  GridTooCoarse,
  NotACurve,
  NoCurve,
  GapChainViolated,
  ConfigInvalid,
};

/// Library-wide exception. `index` and `k` carry optional context:
/// the failing quadrangle side for NoCurve, the offending quasimomentum
/// for GapChainViolated and sweep failures.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

  int index = -1;
  std::array<double, 3> k{0.0, 0.0, 0.0};
  bool has_k = false;

private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::CouplingOrderViolated: return "CouplingOrderViolated";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::WrongDegree: return "WrongDegree";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::ScanResolutionTooCoarse: return "ScanResolutionTooCoarse";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotACurve: return "NotACurve";
    case ErrorCode::NoCurve: return "NoCurve";
    case ErrorCode::GapChainViolated: return "GapChainViolated";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace qgband
