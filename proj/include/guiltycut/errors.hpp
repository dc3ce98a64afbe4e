#pragma once

#include <stdexcept>
#include <string>

namespace guiltycut {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration problems: the caller asked for something the solver cannot
// honour (bad name, invalid constants, Lipschitz ball too small, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};
class UnknownProblem : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};
class RegimeViolation : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};
class DimensionTooLarge : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

// Budget problems: the run was valid but ran out of iterations or time.
class BudgetError : public Error {
 public:
  using Error::Error;
};
class MaxOuterExceeded : public BudgetError {
 public:
  using BudgetError::BudgetError;
};
class RuntimeBudgetExceeded : public BudgetError {
 public:
  using BudgetError::BudgetError;
};
class SamplingBudgetExhausted : public BudgetError {
 public:
  using BudgetError::BudgetError;
};

// Numerical breakdowns and violated guarantees.
class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};
class ZeroNormalCut : public Error {
 public:
  using Error::Error;
};
class EmptyInteriorSuspected : public Error {
 public:
  using Error::Error;
};
class CertificateScanFailed : public Error {
 public:
  using Error::Error;
};
class CertificateInvariantViolated : public Error {
 public:
  using Error::Error;
};
class EigenFailure : public Error {
 public:
  using Error::Error;
};
class ProgressAssertionFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace guiltycut
