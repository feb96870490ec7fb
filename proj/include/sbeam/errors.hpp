#pragma once

#include <stdexcept>
#include <string>

namespace sbeam {

// Base for every numerical failure raised by the library. Configuration
// problems are reported as std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, long long step, int run = -1)
      : Error(what), step_(step), run_(run) {}
  long long step() const { return step_; }
  int run() const { return run_; }

 private:
  long long step_;
  int run_;
};

class NoSuperradiantSolution : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class NoRootFound : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DivisionUnstable : public Error {
 public:
  using Error::Error;
};

}  // namespace sbeam
