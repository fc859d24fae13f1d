#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace ctrl_dos {

enum class ErrorCode {
  InvalidInput,
  InvalidParameter,
  NumericalFailure,
  RankDeficiency,
  NotControllable,
  InadmissibleLambda,
  NoCrossing,
  LambdaTooSmall,
  MonitorResolution,
  OutOfRange,
  Config,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library. The code drives CLI exit status;
/// `residual` and `rank` are populated by the solvers and the controllability
/// test respectively.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  std::optional<double> residual;
  std::optional<int> rank;

 private:
  ErrorCode code_;
};

}  // namespace ctrl_dos
