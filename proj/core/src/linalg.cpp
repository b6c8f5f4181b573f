#include "qfi/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "qfi/errors.hpp"

namespace qfi {

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

void require_hermitian(const Matrix& m, double tol, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + " is not square");
  }
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol)) {
    throw ValidationError(std::string(what) + " is not Hermitian (relative defect " +
                          std::to_string(defect) + ")");
  }
}

Spectrum::Spectrum(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw InternalConsistencyError("Hermitian eigendecomposition failed");
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Matrix Spectrum::propagator(double dt, double hbar) const {
  Vector phases(dim());
  for (Eigen::Index k = 0; k < dim(); ++k) phases[k] = std::polar(1.0, -values_[k] * dt / hbar);
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Vector Spectrum::evolve(const Vector& v, double dt, double hbar) const {
  Vector c = vectors_.adjoint() * v;
  for (Eigen::Index k = 0; k < dim(); ++k) c[k] *= std::polar(1.0, -values_[k] * dt / hbar);
  return vectors_ * c;
}

Vector Spectrum::exp_i(const Vector& v, double s) const {
  Vector c = vectors_.adjoint() * v;
  for (Eigen::Index k = 0; k < dim(); ++k) c[k] *= std::polar(1.0, values_[k] * s);
  return vectors_ * c;
}

}  // namespace qfi
