#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "qfi/estimate.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/hamiltonian_family.hpp"

namespace qfi::correlator {

/// Uniform grid of n_slices intervals on [0, t]; nodes are k t / n_slices for
/// k = 0..n_slices.
class TimeGrid {
 public:
  TimeGrid(double t, int n_slices);

  double t() const noexcept { return t_; }
  int n_slices() const noexcept { return n_slices_; }
  int n_nodes() const noexcept { return n_slices_ + 1; }
  double node(int k) const;
  double spacing() const noexcept { return t_ / n_slices_; }

 private:
  double t_;
  int n_slices_;
};

enum class Branch { plus, minus };

struct Kick {
  int slice = 0;
  /// Impulse strength in λ-units × time.
  double strength = 0.0;
};

/// Impulse sources on one branch of the closed time path. Each kick inserts
/// exp(+i ε ô / ħ) into that branch's forward evolution at its node; the
/// minus branch enters Z through its adjoint.
struct SourceProfile {
  Branch branch = Branch::plus;
  std::vector<Kick> kicks;
};

struct Options {
  exact::Options exact;
  /// Default kick strength in units of ħ.
  double kick_strength = 1e-3;
  /// Richardson pair (ε, ε/2) agreement required before accepting ε.
  double kick_agreement = 1e-6;
  int max_kick_adjustments = 6;
  /// |Z| below this is a DomainError.
  double z_floor = 1e-12;
  int max_slices = 64;
  /// Threads for the double sum; the reduction order is fixed.
  int threads = 1;
};

/// U†(t′, 0) ô U(t′, 0).
Matrix heisenberg_matrix(const HamiltonianFamily& family, const Params& lambda, const Matrix& o,
                         double t_prime, const exact::Options& options = {});

/// F = (4/ħ²) Var(Ō), Ō = ∫₀ᵗ ô_H(t′) dt′ with ô = −∂H. Time-independent
/// families are evaluated in the eigenbasis of H; time-dependent ones fall
/// back to Gauss–Legendre quadrature of ô_H (flagged in the warnings).
QfiEstimate qfi_correlator_integral(const HamiltonianFamily& family, const QuantumState& state0,
                                    const Params& lambda, std::size_t parameter, double t,
                                    const exact::Options& options = {});

/// Evaluates the source-dependent generating functional on a fixed grid.
/// Node propagators and the spectral decomposition of ô are computed once.
class Contour {
 public:
  Contour(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
          const TimeGrid& grid, const Matrix& o, const Options& options = {});
  ~Contour();
  Contour(Contour&&) noexcept;
  Contour& operator=(Contour&&) noexcept;

  /// Z = ⟨ψ₀|Ũ₋†Ũ₊|ψ₀⟩.
  std::complex<double> z(const SourceProfile& plus, const SourceProfile& minus) const;
  /// Principal-branch ln Z; throws DomainError when |Z| < z_floor.
  std::complex<double> log_z(const SourceProfile& plus, const SourceProfile& minus) const;

  /// Central mixed second difference of ln Z in a minus-branch kick at
  /// `k_minus` and a plus-branch kick at `k_plus`.
  std::complex<double> mixed_derivative(int k_minus, int k_plus, double eps) const;

  /// ⟨ô_H(t_a) ô_H(t_b)⟩ − ⟨ô_H(t_a)⟩⟨ô_H(t_b)⟩ computed directly from
  /// Heisenberg-evolved states.
  std::complex<double> connected_wightman(int k_a, int k_b) const;

  /// Ũ|ψ₀⟩ with a single kick of the given strength at node k.
  Vector single_kick_state(int k, double strength) const;
  /// U(t, 0)|ψ₀⟩.
  const Vector& final_state() const;

  const TimeGrid& grid() const noexcept;
  double hbar() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::complex<double> ctp_log_z(const HamiltonianFamily& family, const QuantumState& state0,
                               const Params& lambda, const TimeGrid& grid, const Matrix& o,
                               const SourceProfile& plus, const SourceProfile& minus,
                               const Options& options = {});

std::complex<double> ctp_mixed_derivative(const HamiltonianFamily& family, const QuantumState& state0,
                                          const Params& lambda, const TimeGrid& grid, const Matrix& o,
                                          int k_minus, int k_plus, double eps,
                                          const Options& options = {});

/// F = 4 ΣΣ w_a w_b Re δ²lnZ/δJ₋(t_a)δJ₊(t_b) with trapezoid weights. The
/// difference to the same sum on every other node is attached as the
/// discretization error.
QfiEstimate qfi_from_lnz(const HamiltonianFamily& family, const QuantumState& state0,
                         const Params& lambda, const TimeGrid& grid, const Matrix& o,
                         const Options& options = {});

/// Same with ô = −∂H/∂λ_parameter.
QfiEstimate qfi_from_lnz(const HamiltonianFamily& family, const QuantumState& state0,
                         const Params& lambda, std::size_t parameter, const TimeGrid& grid,
                         const Options& options = {});

}  // namespace qfi::correlator
