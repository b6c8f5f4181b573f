#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qfi/types.hpp"

namespace qfi {

/// Parameterized Hermitian family H(λ[, t]) on a finite basis together with
/// its analytic deformations ∂H/∂λ_i.
class HamiltonianFamily {
 public:
  using HamiltonianFn = std::function<Matrix(const Params&, double t)>;
  using DeformationFn = std::function<std::vector<Matrix>(const Params&, double t)>;

  static constexpr double kHermitianTolerance = 1e-12;

  struct Definition {
    std::string id;
    Eigen::Index dim = 0;
    double hbar = 1.0;
    std::vector<std::string> labels;
    HamiltonianFn hamiltonian;
    DeformationFn deformations;
    bool time_dependent = false;
    /// Grid positions for position-grid models, used by the deformation
    /// consistency check against the classical Lagrangian.
    std::optional<RealVector> grid_positions;
    std::string discretization;
  };

  explicit HamiltonianFamily(Definition def);

  const std::string& id() const noexcept { return def_.id; }
  Eigen::Index dim() const noexcept { return def_.dim; }
  double hbar() const noexcept { return def_.hbar; }
  const std::vector<std::string>& labels() const noexcept { return def_.labels; }
  std::size_t num_parameters() const noexcept { return def_.labels.size(); }
  bool time_dependent() const noexcept { return def_.time_dependent; }
  const std::optional<RealVector>& grid_positions() const noexcept { return def_.grid_positions; }
  const std::string& discretization() const noexcept { return def_.discretization; }
  const Definition& definition() const noexcept { return def_; }

  /// Throws ValidationError if the result is not Hermitian within kHermitianTolerance.
  Matrix hamiltonian_at(const Params& lambda, double t = 0.0) const;
  std::vector<Matrix> deformations_at(const Params& lambda, double t = 0.0) const;
  Matrix deformation_at(const Params& lambda, std::size_t index, double t = 0.0) const;

  /// Index of a parameter label; throws ValidationError if absent.
  std::size_t parameter_index(const std::string& label) const;

 private:
  void check_params(const Params& lambda) const;

  Definition def_;
};

}  // namespace qfi
