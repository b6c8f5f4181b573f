#pragma once

#include <string_view>

#include "qfi/types.hpp"

namespace qfi {

/// ‖M − M†‖_F / max(1, ‖M‖_F).
double hermiticity_defect(const Matrix& m);

/// Throws ValidationError naming `what` if the relative defect exceeds `tol`.
void require_hermitian(const Matrix& m, double tol, std::string_view what);

/// Eigendecomposition of a Hermitian matrix, M = V diag(E) V†.
class Spectrum {
 public:
  explicit Spectrum(const Matrix& hermitian);

  const RealVector& values() const noexcept { return values_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  Eigen::Index dim() const noexcept { return values_.size(); }

  /// exp(-i M dt / hbar).
  Matrix propagator(double dt, double hbar) const;
  /// exp(-i M dt / hbar) v without forming the matrix.
  Vector evolve(const Vector& v, double dt, double hbar) const;
  /// exp(i s M) v.
  Vector exp_i(const Vector& v, double s) const;

  Vector to_eigenbasis(const Vector& v) const { return vectors_.adjoint() * v; }
  Matrix to_eigenbasis(const Matrix& m) const { return vectors_.adjoint() * m * vectors_; }
  Matrix from_eigenbasis(const Matrix& m) const { return vectors_ * m * vectors_.adjoint(); }

 private:
  RealVector values_;
  Matrix vectors_;
};

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace qfi
