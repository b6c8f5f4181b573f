#include "qfi/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qfi/errors.hpp"

namespace qfi::classical {
namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// One leapfrog (kick-drift-kick) step. The Lagrangian is sampled at the
// position midpoint with the drift velocity p_half / m.
void leapfrog_step(const ClassicalModel& model, std::vector<double>& q, std::vector<double>& p, const Params& lambda,
                   double t, double h, double& action, std::vector<double>& d_action, std::vector<double>& scratch,
                   std::vector<double>& q_mid, std::vector<double>& qdot, std::vector<double>& dl) {
  const auto r = q.size();
  model.force(q, lambda, t, scratch);
  for (std::size_t i = 0; i < r; ++i) {
    p[i] += 0.5 * h * scratch[i];
    qdot[i] = p[i] / model.mass;
    q_mid[i] = q[i] + 0.5 * h * qdot[i];
    q[i] += h * qdot[i];
  }
  const double t_mid = t + 0.5 * h;
  action += h * model.lagrangian(q_mid, qdot, lambda, t_mid);
  model.dlagrangian(q_mid, qdot, lambda, t_mid, dl);
  for (std::size_t k = 0; k < dl.size(); ++k) d_action[k] += h * dl[k];
  model.force(q, lambda, t + h, scratch);
  for (std::size_t i = 0; i < r; ++i) p[i] += 0.5 * h * scratch[i];
}

// Augmented state (q, p, S, ∂S) integrated with classical RK4.
class Rk4 {
 public:
  Rk4(const ClassicalModel& model, const Params& lambda)
      : model_(model),
        lambda_(lambda),
        r_(static_cast<std::size_t>(model.dof)),
        m_(model.num_parameters()),
        n_(2 * r_ + 1 + m_),
        y_(n_),
        tmp_(n_),
        f_(r_),
        qd_(r_),
        dl_(m_) {
    for (auto& k : k_) k.resize(n_);
  }

  void step(std::vector<double>& q, std::vector<double>& p, double t, double h, double& action,
            std::vector<double>& d_action) {
    std::fill(y_.begin(), y_.end(), 0.0);
    std::copy(q.begin(), q.end(), y_.begin());
    std::copy(p.begin(), p.end(), y_.begin() + static_cast<std::ptrdiff_t>(r_));
    constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
    for (int s = 0; s < 4; ++s) {
      for (std::size_t i = 0; i < n_; ++i) tmp_[i] = s == 0 ? y_[i] : y_[i] + c[s] * h * k_[s - 1][i];
      rhs(t + c[s] * h, k_[s]);
    }
    for (std::size_t i = 0; i < n_; ++i) y_[i] += h / 6.0 * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
    std::copy(y_.begin(), y_.begin() + static_cast<std::ptrdiff_t>(r_), q.begin());
    std::copy(y_.begin() + static_cast<std::ptrdiff_t>(r_), y_.begin() + static_cast<std::ptrdiff_t>(2 * r_),
              p.begin());
    action += y_[2 * r_];
    for (std::size_t j = 0; j < m_; ++j) d_action[j] += y_[2 * r_ + 1 + j];
  }

 private:
  void rhs(double time, std::vector<double>& out) {
    const std::span<const double> sq(tmp_.data(), r_);
    for (std::size_t i = 0; i < r_; ++i) qd_[i] = tmp_[r_ + i] / model_.mass;
    model_.force(sq, lambda_, time, f_);
    for (std::size_t i = 0; i < r_; ++i) {
      out[i] = qd_[i];
      out[r_ + i] = f_[i];
    }
    out[2 * r_] = model_.lagrangian(sq, qd_, lambda_, time);
    model_.dlagrangian(sq, qd_, lambda_, time, dl_);
    for (std::size_t j = 0; j < m_; ++j) out[2 * r_ + 1 + j] = dl_[j];
  }

  const ClassicalModel& model_;
  const Params& lambda_;
  std::size_t r_, m_, n_;
  std::vector<double> y_, tmp_, f_, qd_, dl_;
  std::vector<double> k_[4];
};

}  // namespace

double ClassicalModel::hamiltonian(ConstSpan q, ConstSpan p, const Params& lambda, double t) const {
  double kinetic = 0.0;
  for (double pi : p) kinetic += pi * pi;
  return kinetic / (2.0 * mass) + potential(q, lambda, t);
}

double ClassicalModel::lagrangian(ConstSpan q, ConstSpan qdot, const Params& lambda, double t) const {
  double kinetic = 0.0;
  for (double v : qdot) kinetic += v * v;
  return 0.5 * mass * kinetic - potential(q, lambda, t);
}

void ClassicalModel::flow(ConstSpan q, ConstSpan p, const Params& lambda, double t, MutSpan dq, MutSpan dp) const {
  for (std::size_t i = 0; i < q.size(); ++i) dq[i] = p[i] / mass;
  force(q, lambda, t, dp);
}

StepperConfig default_stepper(const ClassicalModel& model) {
  return {model.characteristic_time / 200.0, Scheme::rk4};
}

TrajectoryResult integrate_trajectory(const ClassicalModel& model, const PhaseSpacePoint& x0, const Params& lambda,
                                      double t, const StepperConfig& cfg, TrajectoryRecord* record) {
  const auto r = static_cast<std::size_t>(model.dof);
  if (x0.q.size() != r || x0.p.size() != r) throw ValidationError("phase-space point has the wrong dimension");
  if (!(cfg.dt > 0.0)) throw ValidationError("time step must be positive");
  if (!(t >= 0.0)) throw ValidationError("evolution time must be non-negative");
  if (static_cast<std::size_t>(lambda.size()) != model.num_parameters()) {
    throw ValidationError("parameter vector has the wrong length");
  }

  TrajectoryResult out;
  out.final = x0;
  out.d_action.assign(model.num_parameters(), 0.0);
  auto& q = out.final.q;
  auto& p = out.final.p;
  const double e0 = model.hamiltonian(q, p, lambda, 0.0);
  std::vector<double> scratch(r), q_mid(r), qdot(r), dl(model.num_parameters());
  Rk4 rk4(model, lambda);

  const auto full_steps = static_cast<long>(std::floor(t / cfg.dt * (1.0 + 1e-12)));
  const double remainder = t - static_cast<double>(full_steps) * cfg.dt;
  const long total = full_steps + (remainder > 1e-12 * std::max(1.0, t) ? 1 : 0);

  if (record) {
    record->times.assign(1, 0.0);
    record->points.assign(1, out.final);
  }
  double time = 0.0;
  for (long s = 0; s < total; ++s) {
    const double h = s < full_steps ? cfg.dt : remainder;
    if (cfg.scheme == Scheme::leapfrog) {
      leapfrog_step(model, q, p, lambda, time, h, out.action, out.d_action, scratch, q_mid, qdot, dl);
    } else {
      rk4.step(q, p, time, h, out.action, out.d_action);
    }
    time = s + 1 == total ? t : static_cast<double>(s + 1) * cfg.dt;
    if (!all_finite(q) || !all_finite(p) || !std::isfinite(out.action)) {
      throw DivergenceError("classical trajectory diverged", time);
    }
    if (record) {
      record->times.push_back(time);
      record->points.push_back(out.final);
    }
  }
  out.steps = total;
  const double e1 = model.hamiltonian(q, p, lambda, t);
  out.energy_drift = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300);
  return out;
}

double shooting_momentum_bound(const ClassicalModel& model, double q_i, double q_f, const Params& lambda, double t) {
  const double v = std::abs(q_f - q_i) / t;
  const double vi = std::abs(model.potential(std::span<const double>(&q_i, 1), lambda, 0.0));
  const double vf = std::abs(model.potential(std::span<const double>(&q_f, 1), lambda, t));
  const double window =
      0.5 * model.mass * v * v + vi + vf + model.hbar * 2.0 * std::numbers::pi / model.characteristic_time;
  return 4.0 * std::sqrt(2.0 * model.mass * window);
}

ShootingResult shoot_bvp_1d(const ClassicalModel& model, double q_i, double q_f, const Params& lambda, double t,
                            const StepperConfig& cfg, const ShootingOptions& options) {
  if (model.dof != 1) throw UnsupportedError("shooting is implemented for one degree of freedom");
  if (!(t > 0.0)) throw ValidationError("shooting needs a positive time");
  if (options.scan_points < 2) throw ValidationError("shooting scan needs at least two points");

  auto residual = [&](double p0) {
    const auto traj = integrate_trajectory(model, {{q_i}, {p0}}, lambda, t, cfg);
    return traj.final.q[0] - q_f;
  };

  const double p_max = shooting_momentum_bound(model, q_i, q_f, lambda, t);
  const int n = options.scan_points;
  std::vector<double> ps(static_cast<std::size_t>(n)), rs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ps[k] = -p_max + 2.0 * p_max * k / (n - 1);
    rs[k] = residual(ps[k]);
  }

  // Lowest-|p| bracket wins.
  int best = -1;
  double best_abs = std::numeric_limits<double>::infinity();
  int brackets = 0;
  for (int k = 0; k + 1 < n; ++k) {
    if (rs[k] == 0.0 || std::signbit(rs[k]) != std::signbit(rs[k + 1])) {
      ++brackets;
      const double mid = std::abs(0.5 * (ps[k] + ps[k + 1]));
      if (mid < best_abs) {
        best_abs = mid;
        best = k;
      }
    }
  }
  if (best < 0) {
    throw NoBranchError("no classical branch connects q_i=" + std::to_string(q_i) + " to q_f=" + std::to_string(q_f) +
                        " within |p_i| <= " + std::to_string(p_max));
  }

  double a = ps[best], b = ps[best + 1];
  double ra = rs[best], rb = rs[best + 1];
  double root = ra == 0.0 ? a : 0.5 * (a + b);
  int it = 0;
  if (ra != 0.0) {
    // Bisection down to a tight bracket, then secant polish.
    for (; it < options.max_iterations && b - a > 1e-6 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      const double rm = residual(m);
      if (rm == 0.0) {
        a = b = m;
        ra = rb = 0.0;
        break;
      }
      if (std::signbit(rm) == std::signbit(ra)) {
        a = m;
        ra = rm;
      } else {
        b = m;
        rb = rm;
      }
    }
    double x0 = a, x1 = b, r0 = ra, r1 = rb;
    root = std::abs(r0) < std::abs(r1) ? x0 : x1;
    double rr = std::min(std::abs(r0), std::abs(r1));
    for (; it < options.max_iterations && rr > options.tolerance && r1 != r0; ++it) {
      const double x2 = x1 - r1 * (x1 - x0) / (r1 - r0);
      x0 = x1;
      r0 = r1;
      x1 = x2;
      r1 = residual(x1);
      root = x1;
      rr = std::abs(r1);
    }
    if (rr > options.tolerance * std::max(1.0, std::abs(q_f)) * 1e3) {
      throw ConvergenceError("shooting did not converge", rr);
    }
  }

  ShootingResult out;
  out.p_initial = root;
  const double h = 1e-6 * std::max(1.0, std::abs(root));
  out.jacobian = (residual(root + h) - residual(root - h)) / (2.0 * h);
  if (std::abs(out.jacobian) < options.caustic_threshold) {
    throw CausticError("endpoint Jacobian dq_f/dp_i = " + std::to_string(out.jacobian) + " is below the caustic threshold");
  }
  out.action = integrate_trajectory(model, {{q_i}, {root}}, lambda, t, cfg).action;
  if (brackets > 1) out.warnings.push_back(std::to_string(brackets) + " branches found; lowest |p_i| selected");
  return out;
}

double van_vleck_determinant_1d(const ClassicalModel& model, double q_i, double q_f, const Params& lambda, double t,
                                const StepperConfig& cfg, double delta, const ShootingOptions& options) {
  if (!(delta > 0.0)) throw ValidationError("finite-difference step must be positive");
  const auto centre = shoot_bvp_1d(model, q_i, q_f, lambda, t, cfg, options);
  const auto plus = shoot_bvp_1d(model, q_i, q_f + delta, lambda, t, cfg, options);
  const auto minus = shoot_bvp_1d(model, q_i, q_f - delta, lambda, t, cfg, options);
  const double dp = (plus.p_initial - minus.p_initial) / (2.0 * delta);
  // Branch jumps show up as a derivative inconsistent with the local Jacobian.
  if (std::abs(dp * centre.jacobian - 1.0) > 1e-3) {
    throw CausticError("shooting branch changed across the finite-difference stencil");
  }
  return std::abs(dp);
}

}  // namespace qfi::classical
