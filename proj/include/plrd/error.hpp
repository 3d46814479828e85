#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plrd {

enum class ErrorCode {
  // data errors
  LengthMismatch,
  NonFinite,
  EmptySide,
  DegenerateX,
  InvalidConfig,
  InvalidAlpha,
  ParseError,
  Io,
  // numerical / solver errors
  RankDeficient,
  InsufficientDof,
  Infeasible,
  SolverStall,
  NumericalBreakdown,
  CertificateMismatch,
  BranchInfeasible,
  EmptyKernelWindow,
};

std::string_view to_string(ErrorCode code);

/// True for codes caused by bad input rather than by a numerical failure.
bool is_data_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace plrd
