#pragma once

#include <stdexcept>
#include <string>

namespace dra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, incompatible algorithm/instance pairs, malformed files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Iterates left the trust region (non-finite or norm blow-up).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long round) : Error(what), round_(round) {}
  long round() const noexcept { return round_; }

 private:
  long round_;
};

// An inner solve stalled before reaching its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
  double achieved_residual() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// The centralized reference solver ran out of iterations.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, double achieved, long iterations)
      : Error(what), achieved_(achieved), iterations_(iterations) {}
  double achieved_residual() const noexcept { return achieved_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double achieved_;
  long iterations_;
};

}  // namespace dra
