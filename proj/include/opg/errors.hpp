#pragma once

#include <stdexcept>
#include <string>

namespace opg {

// Malformed values: non-finite entries, length mismatches, empty inputs.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented operation precondition does not hold (e.g. behavior policy
// without full support).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation invoked in the wrong baseline regime (e.g. water-filling solver
// with b <= 0).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad experiment configuration (CLI/JSON layer).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A run left the trusted numeric range; carries the offending step.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

// Internal consistency check failed; indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace opg
