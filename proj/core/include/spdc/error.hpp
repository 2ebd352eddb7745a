#pragma once
#include <stdexcept>
#include <string>
#include <string_view>

namespace spdc {

enum class ErrorCode {
  OutOfRange,
  NonPhysical,
  DegenerateAxis,
  TotalInternalReflection,
  ConvergenceFailure,
  EnergyMismatch,
  NoRoot,
  DomainError,
  WrongFrame,
  NullspaceDegenerate,
  AllZero,
  InvalidArgument,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what);
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string &what);

} // namespace spdc
