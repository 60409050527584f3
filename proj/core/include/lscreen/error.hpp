#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lscreen {

enum class Errc {
  DimensionMismatch,
  InvalidArgument,
  IndexOutOfRange,
  EmptyRegion,
  ImproperRegion,
  NotRefinable,
  NotApplicable,
  DegenerateRegion,
  InconsistentSystem,
  SafetyViolation,
  DomainError,
  IoError,
  InvariantViolation,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace lscreen
