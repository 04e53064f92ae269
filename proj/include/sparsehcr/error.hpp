#ifndef SPARSEHCR_ERROR_HPP
#define SPARSEHCR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsehcr {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  RankDeficient,
  OddDof,
  OddM,
  CapExceeded,
  Infeasible,
  SameSupport,
  DegenerateSubspace,
  NoAlternativeSupport,
  BetaOutOfRange,
  InvalidDims,
  InputIo,
  OutputIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::OddDof: return "OddDof";
    case ErrorCode::OddM: return "OddM";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::SameSupport: return "SameSupport";
    case ErrorCode::DegenerateSubspace: return "DegenerateSubspace";
    case ErrorCode::NoAlternativeSupport: return "NoAlternativeSupport";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::InputIo: return "InputIo";
    case ErrorCode::OutputIo: return "OutputIo";
  }
  return "Unknown";
}

/// Domain error raised when an operation's precondition does not hold.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_ERROR_HPP
