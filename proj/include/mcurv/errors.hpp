#pragma once

#include <stdexcept>
#include <string>

namespace mcurv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point outside a chart's open domain, or a quantity undefined at the input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid scalar argument (non-positive aspect ratio, empty sample set, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// The request needs something the inputs cannot provide, e.g. a jet order
// the field does not carry or a chart without a built-in Killing algebra.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}
  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

// An operation's mathematical precondition failed; carries the residual that
// decided it.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Non-finite value met during quadrature or sampling.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A perturbation field could not be built with the requested parameters.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(what), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace mcurv
