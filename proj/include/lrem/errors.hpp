#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lrem {

/// Malformed or inconsistent input data (bad file, bad dimensions, bad flag).
/// Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (non-finite objective, SVD breakdown, divergence).
/// Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Solver divergence; carries the objective trace up to the failure point.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& msg, std::vector<double> trace)
      : NumericError(msg), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Hold-out AUC cannot be computed (no zero or no positive entries in the
/// held-out index set). Maps to CLI exit code 4.
class AucUndefinedError : public std::runtime_error {
 public:
  explicit AucUndefinedError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace lrem
