#pragma once

#include <stdexcept>
#include <string>

namespace binfam {

// Error taxonomy mirrored by the CLI exit codes: I/O failures (2),
// invalid inputs or contract violations (3), numerical failures (4).

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a fitted linear-quadratic parameter assigns negative mass to
// some prefix, i.e. the fitted function is not a probability distribution.
struct NegativeMassError : NumericalError {
  explicit NegativeMassError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace binfam
