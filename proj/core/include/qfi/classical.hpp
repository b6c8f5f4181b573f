#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfi/types.hpp"

namespace qfi::classical {

using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

/// Separable classical model H = p²/2m + V(q; λ, t), L = ½ m q̇² − V.
struct ClassicalModel {
  std::string id;
  int dof = 1;
  double mass = 1.0;
  double hbar = 1.0;
  std::vector<std::string> labels;
  /// 2π / ω_ref, sets the default time step.
  double characteristic_time = 2.0 * 3.14159265358979323846;

  std::function<double(ConstSpan q, const Params& lambda, double t)> potential;
  /// Writes −∂V/∂q.
  std::function<void(ConstSpan q, const Params& lambda, double t, MutSpan force)> force;
  /// Writes ∂L/∂λ_i for every parameter.
  std::function<void(ConstSpan q, ConstSpan qdot, const Params& lambda, double t, MutSpan out)> dlagrangian;

  std::size_t num_parameters() const noexcept { return labels.size(); }

  double hamiltonian(ConstSpan q, ConstSpan p, const Params& lambda, double t) const;
  double lagrangian(ConstSpan q, ConstSpan qdot, const Params& lambda, double t) const;
  /// (dq/dt, dp/dt) = (∂H/∂p, −∂H/∂q).
  void flow(ConstSpan q, ConstSpan p, const Params& lambda, double t, MutSpan dq, MutSpan dp) const;
};

struct PhaseSpacePoint {
  std::vector<double> q;
  std::vector<double> p;
};

struct TrajectoryResult {
  PhaseSpacePoint final;
  double action = 0.0;
  std::vector<double> d_action;
  /// |E(t) − E(0)| / max(|E(0)|, tiny); reported for time-independent models.
  double energy_drift = 0.0;
  long steps = 0;
};

enum class Scheme { leapfrog, rk4 };

struct StepperConfig {
  double dt = 0.0;
  Scheme scheme = Scheme::rk4;
};

/// Default configuration: dt = T_char / 200 with rk4, which keeps the
/// relative energy drift of the catalog models below 1e-6 at that step.
StepperConfig default_stepper(const ClassicalModel& model);

/// Optional per-step record (positions, momenta, times at step boundaries).
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<PhaseSpacePoint> points;
};

/// Integrates Hamilton's equations while accumulating S = ∫L dt and
/// ∂S/∂λ_i = ∫∂L/∂λ_i dt. Leapfrog samples the Lagrangian at the step
/// midpoint with the drift velocity; rk4 integrates the augmented system.
/// The final step is shortened so the trajectory ends exactly at t.
/// Throws DivergenceError on non-finite state.
TrajectoryResult integrate_trajectory(const ClassicalModel& model, const PhaseSpacePoint& x0,
                                      const Params& lambda, double t, const StepperConfig& cfg,
                                      TrajectoryRecord* record = nullptr);

struct ShootingResult {
  double p_initial = 0.0;
  double action = 0.0;
  /// ∂q_f/∂p_i on the found branch.
  double jacobian = 0.0;
  std::vector<std::string> warnings;
};

struct ShootingOptions {
  int scan_points = 400;
  double tolerance = 1e-12;
  int max_iterations = 200;
  double caustic_threshold = 1e-8;
};

/// Two-point boundary problem q(0) = q_i, q(t) = q_f for r = 1, solved by a
/// uniform scan of p_i over [−p_max, p_max], bisection and secant polish.
/// Returns the lowest-|p_i| bracketed branch.
ShootingResult shoot_bvp_1d(const ClassicalModel& model, double q_i, double q_f, const Params& lambda,
                            double t, const StepperConfig& cfg, const ShootingOptions& options = {});

/// Scan bound p_max = 4 √(2 m E_window).
double shooting_momentum_bound(const ClassicalModel& model, double q_i, double q_f, const Params& lambda,
                               double t);

/// |∂p_i/∂q_f| by central difference of the shooting solution.
/// Throws CausticError when the branch is degenerate.
double van_vleck_determinant_1d(const ClassicalModel& model, double q_i, double q_f, const Params& lambda,
                                double t, const StepperConfig& cfg, double delta = 1e-5,
                                const ShootingOptions& options = {});

}  // namespace qfi::classical
