#pragma once

#include "qfi/types.hpp"

namespace qfi {

/// Gaussian Wigner function: mean (q̄, p̄) of length 2r and symmetric
/// covariance Σ ordered (q_1..q_r, p_1..p_r).
struct GaussianStateSpec {
  RealVector mean;
  RealMatrix cov;
  double hbar = 1.0;
  /// False when the Gaussian only matches the first two moments of a
  /// non-Gaussian quantum state.
  bool exact = true;

  int dof() const noexcept { return static_cast<int>(mean.size() / 2); }
};

}  // namespace qfi
