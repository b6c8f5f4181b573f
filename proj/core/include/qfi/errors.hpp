#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qfi {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-Hermitian matrices, dimension mismatches, invalid specs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a configured resource cap (e.g. Hilbert-space dimension).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An iterative refinement (slicing, quadrature, root finding) did not converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A result violates a property that must hold by construction.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// log Z evaluated too close to the branch point.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A classical trajectory produced non-finite values.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time, std::vector<std::size_t> indices = {})
      : Error(what), time_(time), indices_(std::move(indices)) {}
  double time() const noexcept { return time_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  double time_;
  std::vector<std::size_t> indices_;
};

/// The requested combination of model, state and route is not available.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Shooting found no sign change of the endpoint residual in its scan window.
class NoBranchError : public Error {
 public:
  using Error::Error;
};

/// The boundary-value problem is degenerate (vanishing endpoint Jacobian).
class CausticError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfi
