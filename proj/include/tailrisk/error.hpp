#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailrisk {

enum class ErrorKind {
  InvalidArgument,
  InsufficientSamples,
  InvalidDelta,
  InfiniteCVaR,
  NoFiniteMoment,
  BudgetTooSmall,
  DegenerateGaps,
  Unachievable,
  TooFewPoints,
  IOFailure,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// that callers (and the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tailrisk
