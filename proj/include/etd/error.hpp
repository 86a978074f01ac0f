#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace etd {

enum class ErrorCode {
  NonSymmetric,
  SelfLoop,
  Empty,
  Numerical,
  CholeskyFailure,
  DomainError,
  NotFound,
  NotHurwitz,
  SingularSystem,
  NonFinite,
  MissingBaseline,
  ParseError,
  DimensionMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<long> step = std::nullopt)
      : std::runtime_error(message), code_(code), step_(step) {}

  ErrorCode code() const noexcept { return code_; }
  // Simulation step at which the failure was detected, when applicable.
  std::optional<long> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::optional<long> step_;
};

}  // namespace etd
