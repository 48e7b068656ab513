#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eikinetic {

enum class ErrorKind {
  InvalidGrid,
  StencilUnavailable,
  OutOfDomain,
  KernelUnderresolved,
  SupportViolation,
  Configuration,
  Geometry,
  Precondition,
  NearPole,
  CriticalPoint,
  NoSamples,
  InsufficientSamples,
  DegenerateContour,
  Solver,
  Unsupported,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// precondition or numerical failure occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eikinetic
