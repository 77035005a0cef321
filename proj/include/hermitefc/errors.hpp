#pragma once

#include <stdexcept>
#include <string>

namespace hermitefc {

/// Violated precondition on an operation's inputs (programming error).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Truncated division by a polynomial whose constant term is (numerically) zero.
class DegenerateDivision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonpositive density or pressure encountered while advancing a solution.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, double x, double y = 0.0,
                  int stage = -1)
      : std::runtime_error(what), x_(x), y_(y), stage_(stage) {}

  double x() const { return x_; }
  double y() const { return y_; }
  /// RK stage index (1..4), or -1 when raised outside a stage.
  int stage() const { return stage_; }

 private:
  double x_;
  double y_;
  int stage_;
};

/// Exact Riemann problem whose data generates vacuum.
class VacuumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run stopped before its final time (step guard, non-finite values).
class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Malformed or invalid run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace hermitefc
