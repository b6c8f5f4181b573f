#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qfi/classical.hpp"
#include "qfi/gaussian_state.hpp"
#include "qfi/hamiltonian_family.hpp"
#include "qfi/types.hpp"

namespace qfi::models {

/// Catalog conventions:
///   qubit_phase       H = λ σ_z / 2                                 params (lambda)
///   qubit_mixed_axis  H = ω σ_z + λ σ_x                              params (lambda)
///   harmonic          H = p²/2m + ½ m ω² x² − f x                    params (omega, force)
///   quartic           H = p²/2m + ½ m ω₀² x² + g x⁴                  params (g)
///   driven_oscillator H = p²/2m + ½ m ω₀² x² − A sin(Ω t) x          params (amplitude, drive_frequency)
///   lattice_scalar    H = Σ ½π² + ½(φ_{i+1}−φ_i)² + ½ m² φ² + g φ⁴   params (m2, g), periodic
/// with L = ½ m q̇² − V, so ∂L/∂λ = −∂H/∂λ at fixed canonical variables.
enum class ModelId { qubit_phase, qubit_mixed_axis, harmonic, quartic, driven_oscillator, lattice_scalar };

std::string_view to_string(ModelId id);
ModelId model_from_string(std::string_view name);

struct GridDiscretization {
  double half_width = 10.0;
  int points = 256;
};

struct FockDiscretization {
  int n_max = 40;
};

struct LatticeDiscretization {
  int sites = 2;
  /// Local oscillator levels 0..n_max per site.
  int n_max = 8;
};

struct NoDiscretization {};

using Discretization =
    std::variant<NoDiscretization, GridDiscretization, FockDiscretization, LatticeDiscretization>;

struct ModelSpec {
  ModelId id = ModelId::harmonic;
  double mass = 1.0;
  double hbar = 1.0;
  /// Fixed oscillator frequency ω₀ (quartic, driven) or σ_z splitting (qubit_mixed_axis).
  double omega = 1.0;
  /// Reference parameter values: initial states, local bases and the default
  /// time step are fixed here and do not move with λ.
  Params reference;
  Discretization discretization;
};

/// Catalog defaults for the model (reference parameters and discretization).
ModelSpec default_spec(ModelId id);

std::vector<std::string> parameter_labels(ModelId id);
bool has_classical_counterpart(ModelId id);
/// 2π / fastest reference frequency.
double characteristic_time(const ModelSpec& spec);
std::string describe(ModelId id);

/// Throws ValidationError on inconsistent specs.
void validate(const ModelSpec& spec);

HamiltonianFamily build_quantum(const ModelSpec& spec);

/// Throws UnsupportedError for qubit models.
classical::ClassicalModel build_classical(const ModelSpec& spec);

struct StateKind {
  enum class Kind { ground, coherent, gaussian, plus };
  Kind kind = Kind::ground;
  /// Coherent amplitude; q̄ = √(2ħ/mω) Re α, p̄ = √(2ħmω) Im α.
  std::complex<double> alpha{0.0, 0.0};
  /// Explicit Gaussian (single degree of freedom): mean (q̄, p̄), covariance 2×2.
  RealVector mean;
  RealMatrix cov;

  static StateKind ground() { return {}; }
  static StateKind plus() { return {Kind::plus, {}, {}, {}}; }
  static StateKind coherent(std::complex<double> a) { return {Kind::coherent, a, {}, {}}; }
  static StateKind gaussian(RealVector m, RealMatrix c) { return {Kind::gaussian, {}, std::move(m), std::move(c)}; }
};

std::string to_string(const StateKind& kind);

struct InitialState {
  QuantumState state;
  /// Matching Wigner Gaussian; absent when the state has none (qubits).
  std::optional<GaussianStateSpec> gaussian;
  std::vector<std::string> warnings;
};

InitialState initial_state(const ModelSpec& spec, const StateKind& kind);

/// Lattice coupling matrix K(m²): V = ½ φᵀKφ + g Σ φ⁴.
RealMatrix lattice_coupling(int sites, double m2);

/// Spatial grid x_j = −L + j·2L/n for grid models.
RealVector grid_positions(const GridDiscretization& grid);

/// Periodic Fourier-grid kinetic energy matrix −(ħ²/2m) d²/dx².
RealMatrix fourier_kinetic(const GridDiscretization& grid, double mass, double hbar);

}  // namespace qfi::models
