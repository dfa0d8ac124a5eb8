#pragma once

#include <stdexcept>
#include <string>

namespace fastpca {

// Error taxonomy mirrored by the CLI exit codes (see exit_code()).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept { return 1; }
};

// Bad arguments, malformed files, infeasible configuration.
class InputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The gap search bottomed out without a validated estimate.
class NoGapError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// A solver failed to meet its tolerance: non-convergence, conditioning,
// divergence under the chosen step size, or a numerically singular operator.
class ToleranceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

// A loop-count invariant was violated; signals a bad gap estimate or a broken
// inner solver rather than an input problem.
class GuardError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

}  // namespace fastpca
