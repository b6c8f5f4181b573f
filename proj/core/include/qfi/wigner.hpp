#pragma once

#include <cstdint>
#include <vector>

#include "qfi/classical.hpp"
#include "qfi/gaussian_state.hpp"
#include "qfi/models.hpp"

namespace qfi::wigner {

/// Wigner Gaussian of a catalog initial state. Harmonic and driven ground or
/// coherent states are exact; the lattice ground state is Gaussian over the
/// normal modes of the quadratic part. Quartic states get a moment-matched
/// Gaussian flagged as inexact. Throws UnsupportedError for qubits.
GaussianStateSpec gaussian_for(const models::ModelSpec& spec, const models::StateKind& kind);

/// Throws ValidationError unless Σ is symmetric positive definite and
/// Σ + (iħ/2)Ω ⪰ 0 within `tol`.
void validate(const GaussianStateSpec& spec, double tol = 1e-10);

/// Minimum eigenvalue of Σ + (iħ/2)Ω.
double uncertainty_margin(const GaussianStateSpec& spec);

/// Stateless sampler: point i depends only on (seed, i).
class GaussianSampler {
 public:
  /// Throws ValidationError if the Cholesky factorization fails.
  explicit GaussianSampler(const GaussianStateSpec& spec);

  classical::PhaseSpacePoint at(std::uint64_t seed, std::uint64_t index) const;
  /// Writes the 2r coordinates of point i into `out`.
  void fill(std::uint64_t seed, std::uint64_t index, std::span<double> out) const;

  int dof() const noexcept { return dof_; }

 private:
  int dof_;
  RealVector mean_;
  RealMatrix chol_;
};

std::vector<classical::PhaseSpacePoint> sample(const GaussianStateSpec& spec, std::size_t n,
                                               std::uint64_t seed);

}  // namespace qfi::wigner
