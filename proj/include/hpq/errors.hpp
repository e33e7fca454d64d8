#pragma once

#include <stdexcept>
#include <string>

namespace hpq {

enum class ErrorCode {
  DimensionMismatch,
  NonNegativeNorm,
  NotOrthogonal,
  RepeatedPoint,
  NotIsometry,
  PreconditionViolation,
  OutOfBall,
  BadDirection,
  OutsideDomain,
  DegenerateEdge,
  NotAdmissible,
  InvalidParameter,
  EmptyInput,
  SpacelikeViolation,
  NotNormal,
  NewtonDivergence,
  SpacelikeLost,
  OutsidePolarDomain,
  LinkNotSpacelike,
  HypothesisViolated,
  ProjectionFailed,
  NotRankOne,
  NotElliptic,
  NotIncreasing,
  NotSupported,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hpq
