#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qfi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Point in parameter space, one entry per deformation of a family.
using Params = Eigen::VectorXd;

/// Normalized pure state in the basis of a HamiltonianFamily.
class QuantumState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws ValidationError unless |amplitudes| = 1 within kNormTolerance.
  explicit QuantumState(Vector amplitudes);

  /// Rescales to unit norm; throws on a zero vector.
  static QuantumState normalized(Vector amplitudes);

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

  Complex expectation(const Matrix& op) const;

 private:
  Vector amplitudes_;
};

}  // namespace qfi
