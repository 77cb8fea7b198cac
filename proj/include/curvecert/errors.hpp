#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvecert {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument values: negative radii, bad dimensions, NaN inputs, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

// Two curves were required to share one time grid.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// A vector field evaluated to NaN or Inf.
class NonFiniteField : public Error {
 public:
  using Error::Error;
};

// A Picard iterate left the Lipschitz curve space. This falsifies the
// declared (L, K, a, r) constants and must surface, never be projected away.
class SpaceEscape : public Error {
 public:
  using Error::Error;
};

// A curve left the declared Lipschitz ball of the field, so the Gronwall
// hypotheses do not apply.
class BallEscape : public Error {
 public:
  using Error::Error;
};

// A chart-transition point (or its finite-difference neighborhood) is not
// contained in both chart domains.
class OutsideOverlap : public Error {
 public:
  using Error::Error;
};

// The Picard ball that fits inside a chart has non-positive radius.
class ChartTooSmall : public Error {
 public:
  using Error::Error;
};

// A manifold integration step failed to advance time; usually a
// rho_switch / rho_chart misconfiguration.
class NoProgress : public Error {
 public:
  using Error::Error;
};

// Chart-local field representations disagree on an overlap.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Text input (expression or config file) could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position(position) {}
  std::size_t position = 0;
};

// Unknown variable or function name in a field expression.
class UnknownVariable : public Error {
 public:
  UnknownVariable(const std::string& what, std::string name)
      : Error(what), name(std::move(name)) {}
  std::string name;
};

// Expression evaluated outside its numeric domain (division by zero, pow
// domain, overflow).
class EvalError : public Error {
 public:
  using Error::Error;
};

// Config invariant violations; collects every violation, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations_in)
      : Error(join(violations_in)), violations(std::move(violations_in)) {}
  std::vector<std::string> violations;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "config validation failed:";
    for (const auto& s : v) {
      out += "\n  - " + s;
    }
    return out;
  }
};

// File I/O failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvecert
