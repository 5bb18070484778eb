#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlkelvin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: config values, guards, inadmissible designs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent discrete structures (mismatched pair lists, rank-deficient divergence).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped without meeting its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

/// A property that holds by construction was violated (signals a bug).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlkelvin
