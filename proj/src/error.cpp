#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::InvalidParameter: return "invalid parameter";
    case ErrorCode::NumericalFailure: return "numerical failure";
    case ErrorCode::RankDeficiency: return "rank deficiency";
    case ErrorCode::NotControllable: return "not controllable";
    case ErrorCode::InadmissibleLambda: return "inadmissible lambda";
    case ErrorCode::NoCrossing: return "no crossing";
    case ErrorCode::LambdaTooSmall: return "lambda too small";
    case ErrorCode::MonitorResolution: return "monitor resolution";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

}  // namespace ctrl_dos
