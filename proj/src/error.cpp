#include "plrd/error.hpp"

namespace plrd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptySide: return "EmptySide";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientDof: return "InsufficientDof";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::SolverStall: return "SolverStall";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::CertificateMismatch: return "CertificateMismatch";
    case ErrorCode::BranchInfeasible: return "BranchInfeasible";
    case ErrorCode::EmptyKernelWindow: return "EmptyKernelWindow";
  }
  return "Unknown";
}

bool is_data_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch:
    case ErrorCode::NonFinite:
    case ErrorCode::EmptySide:
    case ErrorCode::DegenerateX:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidAlpha:
    case ErrorCode::ParseError:
    case ErrorCode::Io:
      return true;
    default:
      return false;
  }
}

}  // namespace plrd
