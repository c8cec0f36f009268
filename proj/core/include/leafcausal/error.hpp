#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leafcausal {

enum class ErrorCode {
  PointOutsideChart,
  NonFiniteCoefficient,
  BasePointMismatch,
  InvalidCurve,
  InvalidAtlas,
  IndexMismatch,
  NotSameLeaf,
  ChartChainNotFound,
  NotAnIsometry,
  SingularMetric,
  ZeroWarping,
  NoTimelikeDirections,
  LeftAtlas,
  StepUnderflow,
  NotNormal,
  NotTimelike,
  EmptyGrid,
  ResolutionTooCoarse,
  GraphHasCycle,
  UnknownExample,
  AuditFailed,
  ParseError,
  UnknownKey,
  MissingKey,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace leafcausal
