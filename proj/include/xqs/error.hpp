#pragma once

#include <stdexcept>
#include <string>

namespace xqs {

/// Argument outside the documented domain of an operation (p not in (0,1),
/// empty sample, k > n, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Too few observations to fit a model.
class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Likelihood maximization found no usable interior optimum.
class FitFailureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A predictor cannot be evaluated on a training set of the given size.
class SpecInfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// (n, p0, alpha) do not yield a usable cross-validation geometry.
class InfeasiblePlanError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input parsed, but nothing usable was left.
class EmptyDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed model string or config document.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace xqs
