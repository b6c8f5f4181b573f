#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfi/classical.hpp"
#include "qfi/errors.hpp"
#include "qfi/models.hpp"

using namespace qfi;
using namespace qfi::classical;

namespace {

constexpr double kPi = std::numbers::pi;

ClassicalModel harmonic() { return models::build_classical(models::default_spec(models::ModelId::harmonic)); }

Params harmonic_params(double omega = 1.0, double force = 0.0) {
  Params l(2);
  l << omega, force;
  return l;
}

ClassicalModel free_particle() {
  ClassicalModel m;
  m.id = "free";
  m.labels = {"unused"};
  m.potential = [](ConstSpan, const Params&, double) { return 0.0; };
  m.force = [](ConstSpan, const Params&, double, MutSpan f) { f[0] = 0.0; };
  m.dlagrangian = [](ConstSpan, ConstSpan, const Params&, double, MutSpan out) { out[0] = 0.0; };
  return m;
}

PhaseSpacePoint point(double q, double p) { return {{q}, {p}}; }

StepperConfig fine(Scheme s = Scheme::rk4) { return {2.0 * kPi / 4000.0, s}; }

}  // namespace

TEST_SUITE("classical-dynamics") {
  TEST_CASE("default stepper uses rk4 at a two-hundredth of the period") {
    const auto cfg = default_stepper(harmonic());
    CHECK(cfg.scheme == Scheme::rk4);
    CHECK(cfg.dt == doctest::Approx(2.0 * kPi / 200.0));
  }

  TEST_CASE("lambda-independent Lagrangian gives zero action derivative") {
    const auto r = integrate_trajectory(free_particle(), point(0.3, 1.1), Params::Zero(1), 2.0, {0.01, Scheme::leapfrog});
    CHECK(r.d_action[0] == 0.0);
    CHECK(r.final.q[0] == doctest::Approx(2.5));
  }

  TEST_CASE("harmonic omega derivative of the action over one period") {
    const auto r = integrate_trajectory(harmonic(), point(1.0, 0.0), harmonic_params(), 2.0 * kPi, fine());
    CHECK(std::abs(r.d_action[0] + kPi) < 1e-6);
    CHECK(std::abs(r.d_action[1]) < 1e-9);
    // Leapfrog is second order, so it needs a finer step for the same tolerance.
    const auto l = integrate_trajectory(harmonic(), point(1.0, 0.0), harmonic_params(), 2.0 * kPi,
                                        {2.0 * kPi / 20000.0, Scheme::leapfrog});
    CHECK(std::abs(l.d_action[0] + kPi) < 1e-6);
    CHECK(std::abs(l.d_action[1]) < 1e-6);
  }

  TEST_CASE("periodic orbit closes with small energy drift") {
    const auto r = integrate_trajectory(harmonic(), point(1.0, 0.0), harmonic_params(), 2.0 * kPi, fine());
    CHECK(std::abs(r.final.q[0] - 1.0) < 1e-6);
    CHECK(std::abs(r.final.p[0]) < 1e-6);
    CHECK(r.energy_drift < 1e-9);
  }

  TEST_CASE("default step keeps energy drift below 1e-6 on time-independent models") {
    for (auto id : {models::ModelId::harmonic, models::ModelId::quartic, models::ModelId::lattice_scalar}) {
      const auto spec = models::default_spec(id);
      const auto m = models::build_classical(spec);
      PhaseSpacePoint x0;
      x0.q.assign(static_cast<std::size_t>(m.dof), 1.0);
      x0.p.assign(static_cast<std::size_t>(m.dof), 0.5);
      const auto r = integrate_trajectory(m, x0, spec.reference, 2.0 * m.characteristic_time, default_stepper(m));
      CHECK(r.energy_drift < 1e-6);
    }
  }

  TEST_CASE("final step is shortened to land on t") {
    TrajectoryRecord rec;
    const auto r = integrate_trajectory(harmonic(), point(1.0, 0.0), harmonic_params(), 1.05, {0.1, Scheme::rk4}, &rec);
    CHECK(r.steps == 11);
    CHECK(rec.times.back() == doctest::Approx(1.05).epsilon(1e-14));
    CHECK(std::abs(r.final.q[0] - std::cos(1.05)) < 1e-6);
  }

  TEST_CASE("leapfrog flow is symplectic at the default step") {
    const auto m = harmonic();
    StepperConfig cfg = default_stepper(m);
    cfg.scheme = Scheme::leapfrog;
    const double h = 1e-6;
    auto fin = [&](double q, double p) { return integrate_trajectory(m, point(q, p), harmonic_params(), 3.0, cfg).final; };
    const auto qp = fin(0.7 + h, 0.2), qm = fin(0.7 - h, 0.2), pp = fin(0.7, 0.2 + h), pm = fin(0.7, 0.2 - h);
    const double j11 = (qp.q[0] - qm.q[0]) / (2 * h), j21 = (qp.p[0] - qm.p[0]) / (2 * h);
    const double j12 = (pp.q[0] - pm.q[0]) / (2 * h), j22 = (pp.p[0] - pm.p[0]) / (2 * h);
    CHECK(std::abs(j11 * j22 - j12 * j21 - 1.0) < 1e-6);
  }

  TEST_CASE("leapfrog endpoint error is second order") {
    const auto m = models::build_classical(models::default_spec(models::ModelId::quartic));
    Params g(1);
    g << 0.1;
    const auto ref = integrate_trajectory(m, point(1.0, 0.0), g, 3.0, {1e-4, Scheme::rk4});
    auto err = [&](double dt) {
      const auto r = integrate_trajectory(m, point(1.0, 0.0), g, 3.0, {dt, Scheme::leapfrog});
      return std::hypot(r.final.q[0] - ref.final.q[0], r.final.p[0] - ref.final.p[0]);
    };
    const double ratio = err(0.02) / err(0.01);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }

  TEST_CASE("accumulated action matches the recomputed integral") {
    const auto m = models::build_classical(models::default_spec(models::ModelId::quartic));
    Params g(1);
    g << 0.1;
    const double dt = 1e-3;
    TrajectoryRecord rec;
    const auto r = integrate_trajectory(m, point(1.0, 0.3), g, 2.0, {dt, Scheme::rk4}, &rec);
    // Simpson on the stored nodes of p q̇ − H with q̇ = p/m.
    double s = 0.0;
    const std::size_t n = rec.points.size() - 1;
    REQUIRE(n % 2 == 0);
    for (std::size_t k = 0; k <= n; ++k) {
      const auto& x = rec.points[k];
      const double val = x.p[0] * x.p[0] / m.mass - m.hamiltonian(x.q, x.p, g, rec.times[k]);
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      s += w * val;
    }
    s *= dt / 3.0;
    CHECK(std::abs(r.action - s) < 1e-8);
  }

  TEST_CASE("diverging trajectory raises a divergence error") {
    ClassicalModel m = free_particle();
    m.potential = [](ConstSpan q, const Params&, double) { return -std::pow(q[0], 4); };
    m.force = [](ConstSpan q, const Params&, double, MutSpan f) { f[0] = 4.0 * std::pow(q[0], 3); };
    CHECK_THROWS_AS(integrate_trajectory(m, point(2.0, 1.0), Params::Zero(1), 10.0, {0.01, Scheme::rk4}),
                    DivergenceError);
  }

  TEST_CASE("shooting: harmonic quarter period and free particle") {
    const auto h = shoot_bvp_1d(harmonic(), 0.0, 1.0, harmonic_params(), kPi / 2, fine());
    CHECK(std::abs(h.p_initial - 1.0) < 1e-7);
    const auto f = shoot_bvp_1d(free_particle(), 0.0, 2.0, Params::Zero(1), 2.0, {0.01, Scheme::rk4});
    CHECK(std::abs(f.p_initial - 1.0) < 1e-9);
    CHECK(std::abs(f.action - 1.0) < 1e-9);
  }

  TEST_CASE("shooting: initial momentum equals minus the action gradient in q_i") {
    const auto m = harmonic();
    const double d = 1e-5;
    const double t = 1.0;
    const auto c = shoot_bvp_1d(m, 0.2, 0.9, harmonic_params(), t, fine());
    const auto up = shoot_bvp_1d(m, 0.2 + d, 0.9, harmonic_params(), t, fine());
    const auto dn = shoot_bvp_1d(m, 0.2 - d, 0.9, harmonic_params(), t, fine());
    CHECK(std::abs(-(up.action - dn.action) / (2 * d) - c.p_initial) < 1e-5);
  }

  TEST_CASE("shooting at a harmonic caustic fails") {
    CHECK_THROWS_AS(shoot_bvp_1d(harmonic(), 0.0, 1.0, harmonic_params(), kPi, fine()), Error);
  }

  TEST_CASE("Van Vleck determinant") {
    CHECK(std::abs(van_vleck_determinant_1d(free_particle(), 0.0, 2.0, Params::Zero(1), 2.0, {0.01, Scheme::rk4}) -
                   0.5) < 1e-5);
    CHECK(std::abs(van_vleck_determinant_1d(harmonic(), 0.0, 1.0, harmonic_params(), kPi / 4, fine()) -
                   std::sqrt(2.0)) < 1e-4);
    CHECK_THROWS_AS(van_vleck_determinant_1d(harmonic(), 0.0, 0.0, harmonic_params(), kPi - 1e-9, fine()), Error);
  }
}
