#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ordcop {

// Input outside a model's admissible domain (bad parameter, bad config, bad data).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Schema and data validation failures surfaced by the I/O layer.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: failed decomposition, optimizer failure, non-PD Hessian.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Conditioning on an event of probability zero (transition from an impossible state).
class NullConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Observation (subject, time, response) has zero model probability.
class ZeroProbabilityError : public NumericalError {
 public:
  ZeroProbabilityError(std::size_t subject, std::size_t time, std::size_t response)
      : NumericalError("zero-probability observation at subject " + std::to_string(subject) +
                       ", time index " + std::to_string(time) + ", response " +
                       std::to_string(response)),
        subject(subject), time(time), response(response) {}
  std::size_t subject, time, response;
};

class DegenerateVarianceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class HessianNotNegativeDefinite : public NumericalError {
 public:
  HessianNotNegativeDefinite(const std::string& what, std::vector<double> eigenvalues)
      : NumericalError(what), eigenvalues(std::move(eigenvalues)) {}
  std::vector<double> eigenvalues;
};

}  // namespace ordcop
