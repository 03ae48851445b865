#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace primesig {

// Bad user-supplied parameters (empty sequence, negative dt, unknown enum
// name, ...). The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request would exceed a configured budget (element count, sieve limit,
// allocation size). Distinct from ValidationError so callers can suggest
// raising the budget instead of fixing the arguments.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integer overflow in exact arithmetic, e.g. primorials beyond 15#.
class OverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernel machinery evaluated at (or too close to) a sample point where the
// raw formula has a pole. Callers that want the limit value should go
// through the kernel functions, which special-case these points.
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File read/write failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage failed; carries the stage name so run reports can say
// where things stopped. The CLI maps this to exit code 3.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace primesig
