#pragma once

#include <cstddef>
#include <optional>

#include "qfi/estimate.hpp"
#include "qfi/hamiltonian_family.hpp"
#include "qfi/types.hpp"

namespace qfi::exact {

struct Options {
  /// Successive slicing refinements must agree to this vector/column norm.
  double slicing_tolerance = 1e-9;
  int initial_slices = 8;
  int max_slice_doublings = 16;
  /// Duhamel quadrature: relative Frobenius change between order n and 2n.
  double quadrature_tolerance = 1e-9;
  int max_quadrature_doublings = 11;
  /// Default finite-difference step is dlambda_rel * max(1, |λ_i|).
  double dlambda_rel = 1e-5;
  /// Steps at or below this trigger a precision warning.
  double dlambda_floor = 1e-9;
  Eigen::Index dim_cap = 4096;
};

/// Ĝ = (1/ħ) ∫₀ᵗ U†(t′) ∂H(t′) U(t′) dt′ for one parameter.
struct DeformationGenerator {
  Matrix matrix;
  double t = 0.0;
  Params lambda;
  std::size_t parameter = 0;
  int quadrature_nodes = 0;
  /// True when [H, ∂H] vanished and the closed form t ∂H / ħ was used.
  bool commuting = false;
};

/// U(t1, t0)|state⟩. Time-independent families use the spectral exponential;
/// time-dependent ones use fourth-order commutator-free exponential slicing
/// with step halving.
QuantumState propagate(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                       const QuantumState& state, const Options& options = {});

/// Full propagator matrix U(t1, t0).
Matrix propagator(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                  const Options& options = {});

DeformationGenerator duhamel_generator(const HamiltonianFamily& family, const Params& lambda,
                                       std::size_t parameter, double t, int quad_order = 16,
                                       const Options& options = {});

/// F = 4(⟨G²⟩ − ⟨G⟩²) in the initial state.
QfiEstimate qfi_generator_variance(const QuantumState& state0, const DeformationGenerator& generator);

/// F = 4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²) with |∂ψ(t)⟩ from a Richardson-extrapolated
/// central difference of propagate().
QfiEstimate qfi_overlap_fd(const HamiltonianFamily& family, const QuantumState& state0,
                           const Params& lambda, std::size_t parameter, double t,
                           std::optional<double> dlambda = std::nullopt, const Options& options = {});

/// F_ij = 2⟨{G_i, G_j}⟩ − 4⟨G_i⟩⟨G_j⟩ over every parameter of the family.
QfimEstimate qfim(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                  double t, const Options& options = {});

/// ‖(ħ/i) ∂_λ(U|ψ₀⟩) + ħ U G|ψ₀⟩‖: the finite-difference derivative of the
/// evolved state against the operator built from the Duhamel generator.
double insertion_amplitude_check(const HamiltonianFamily& family, const QuantumState& state0,
                                 const Params& lambda, std::size_t parameter, double t,
                                 const Options& options = {});

/// Default central-difference step for parameter value x.
double default_step(double x, const Options& options);

/// Richardson-extrapolated derivative of the evolved state with respect to λ_i.
Vector state_derivative(const HamiltonianFamily& family, const QuantumState& state0,
                        const Params& lambda, std::size_t parameter, double t, double step,
                        const Options& options);

/// Shared covariance kernel: 4(Re⟨u|v⟩ − mean_u mean_v) where u = G_i ψ, v = G_j ψ.
double generator_covariance(const Vector& u, const Vector& v, double mean_u, double mean_v);

}  // namespace qfi::exact
