#include <spdc/error.hpp>

namespace spdc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::OutOfRange: return "OutOfRange";
  case ErrorCode::NonPhysical: return "NonPhysical";
  case ErrorCode::DegenerateAxis: return "DegenerateAxis";
  case ErrorCode::TotalInternalReflection: return "TotalInternalReflection";
  case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
  case ErrorCode::EnergyMismatch: return "EnergyMismatch";
  case ErrorCode::NoRoot: return "NoRoot";
  case ErrorCode::DomainError: return "DomainError";
  case ErrorCode::WrongFrame: return "WrongFrame";
  case ErrorCode::NullspaceDegenerate: return "NullspaceDegenerate";
  case ErrorCode::AllZero: return "AllZero";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::Config: return "Config";
  case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

} // namespace spdc
