#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qfi/correlator.hpp"
#include "qfi/errors.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/models.hpp"
#include "qfi/rng.hpp"

using namespace qfi;
using namespace qfi::correlator;

namespace {

Params one(double x) { return Params::Constant(1, x); }

HamiltonianFamily qubit_phase() { return test::linear_family(Matrix::Zero(2, 2), {0.5 * test::sigma_z()}); }
HamiltonianFamily mixed_axis() { return test::linear_family(test::sigma_z(), {test::sigma_x()}); }

}  // namespace

TEST_SUITE("correlator-engine") {
  TEST_CASE("time grid nodes") {
    const TimeGrid g(2.0, 4);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(4) == 2.0);
    CHECK(g.spacing() == 0.5);
    CHECK_THROWS_AS(TimeGrid(1.0, 1), ValidationError);
  }

  TEST_CASE("Heisenberg matrix: commuting, t = 0 and qubit rotation") {
    const auto f = test::linear_family(test::sigma_z(), {Matrix::Zero(2, 2)});
    CHECK((heisenberg_matrix(f, one(0.0), test::sigma_z(), 1.3) - test::sigma_z()).norm() < 1e-14);
    CHECK((heisenberg_matrix(f, one(0.0), test::sigma_x(), 0.0) - test::sigma_x()).norm() < 1e-14);
    CHECK((heisenberg_matrix(f, one(0.0), test::sigma_x(), std::numbers::pi / 2) + test::sigma_x()).norm() < 1e-10);
  }

  TEST_CASE("correlator integral: qubit phase and eigenstate cases") {
    CHECK(qfi_correlator_integral(qubit_phase(), test::plus_state(), one(1.0), 0, 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    Vector up(2);
    up << 1.0, 0.0;
    CHECK(qfi_correlator_integral(qubit_phase(), QuantumState(up), one(1.0), 0, 1.0).value == 0.0);
  }

  TEST_CASE("correlator integral: harmonic force model at t = pi") {
    const auto spec = models::default_spec(models::ModelId::harmonic);
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::ground()).state;
    const double ci = qfi_correlator_integral(f, psi, spec.reference, 1, std::numbers::pi).value;
    const double gv =
        exact::qfi_generator_variance(psi, exact::duhamel_generator(f, spec.reference, 1, std::numbers::pi)).value;
    CHECK(std::abs(ci - 8.0) / 8.0 < 1e-3);
    CHECK(std::abs(ci - gv) < 1e-8);
  }

  TEST_CASE("ln Z without kicks and with cancelling kicks vanishes") {
    const TimeGrid g(1.0, 8);
    const Matrix o = test::sigma_x();
    const auto f = mixed_axis();
    const auto psi = test::random_state(2, 3);
    CHECK(std::abs(ctp_log_z(f, psi, one(0.3), g, o, {Branch::plus, {}}, {Branch::minus, {}})) < 1e-14);
    const SourceProfile plus{Branch::plus, {{3, 1e-3}}};
    const SourceProfile minus{Branch::minus, {{3, 1e-3}}};
    CHECK(std::abs(ctp_log_z(f, psi, one(0.3), g, o, plus, minus)) < 1e-14);
  }

  TEST_CASE("single plus-branch kick yields the one-point function") {
    const TimeGrid g(2.0, 8);
    const Matrix o = test::sigma_x();
    const auto f = mixed_axis();
    const auto psi = test::random_state(2, 5);
    const double eps = 1e-3;
    for (int k : {0, 3, 8}) {
      const auto lz = ctp_log_z(f, psi, one(0.3), g, o, {Branch::plus, {{k, eps}}}, {Branch::minus, {}});
      const double expected = psi.expectation(heisenberg_matrix(f, one(0.3), o, g.node(k))).real();
      CHECK(std::abs(lz.imag() / eps - expected) < 1e-5);
    }
  }

  TEST_CASE("mixed derivative: no fluctuations, constant correlator, Wightman identity") {
    const TimeGrid g(1.0, 8);
    Vector up(2);
    up << 1.0, 0.0;
    const auto phase = qubit_phase();
    CHECK(std::abs(ctp_mixed_derivative(phase, QuantumState(up), one(1.0), g, test::sigma_z(), 2, 5, 1e-3)) < 1e-9);
    for (auto [a, b] : {std::pair{0, 0}, std::pair{2, 7}, std::pair{8, 1}}) {
      const auto md = ctp_mixed_derivative(phase, test::plus_state(), one(1.0), g, 0.5 * test::sigma_z(), a, b, 1e-3);
      CHECK(std::abs(md - 0.25) < 1e-6);
    }
    const TimeGrid g2(2.0, 16);
    const auto psi = test::random_state(2, 7);
    const Contour contour(mixed_axis(), psi, one(0.3), g2, test::sigma_x());
    CounterRng rng(17, 0);
    for (int i = 0; i < 5; ++i) {
      const int a = static_cast<int>(rng.below(17));
      const int b = static_cast<int>(rng.below(17));
      const auto md = contour.mixed_derivative(a, b, 1e-3);
      const auto cw = contour.connected_wightman(a, b);
      const double scale = std::sqrt(std::abs(contour.connected_wightman(a, a) * contour.connected_wightman(b, b)));
      CHECK(std::abs(md - cw) / scale < 5e-5);
    }
  }

  TEST_CASE("kick strength outside the supported window is rejected") {
    const TimeGrid g(1.0, 4);
    CHECK_THROWS_AS(ctp_mixed_derivative(mixed_axis(), test::plus_state(), one(0.3), g, test::sigma_x(), 1, 2, 1.0),
                    ValidationError);
  }

  TEST_CASE("qfi_from_lnz: zero operator, qubit phase and harmonic force") {
    CHECK(qfi_from_lnz(mixed_axis(), test::plus_state(), one(0.3), TimeGrid(1.0, 8), Matrix::Zero(2, 2)).value ==
          doctest::Approx(0.0));
    const auto q = qfi_from_lnz(qubit_phase(), test::plus_state(), one(1.0), 0, TimeGrid(1.0, 32));
    CHECK(std::abs(q.value - 1.0) < 2e-3);
    CHECK(q.metadata.discretization_error.has_value());

    auto spec = models::default_spec(models::ModelId::harmonic);
    spec.discretization = models::GridDiscretization{8.0, 64};
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::ground()).state;
    const auto h = qfi_from_lnz(f, psi, spec.reference, 1, TimeGrid(std::numbers::pi, 24));
    CHECK(std::abs(h.value - 8.0) / 8.0 < 0.02);
  }

  TEST_CASE("qfi_from_lnz converges at second order in the slice width") {
    const auto f = mixed_axis();
    const auto psi = test::plus_state();
    const double ref = qfi_correlator_integral(f, psi, one(0.3), 0, 2.0).value;
    const double e1 = std::abs(qfi_from_lnz(f, psi, one(0.3), 0, TimeGrid(2.0, 16)).value - ref);
    const double e2 = std::abs(qfi_from_lnz(f, psi, one(0.3), 0, TimeGrid(2.0, 32)).value - ref);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
  }

  TEST_CASE("parallel double sum reproduces the serial value bitwise") {
    const auto f = mixed_axis();
    Options serial, parallel;
    parallel.threads = 4;
    const TimeGrid g(2.0, 16);
    const double a = qfi_from_lnz(f, test::plus_state(), one(0.3), 0, g, serial).value;
    const double b = qfi_from_lnz(f, test::plus_state(), one(0.3), 0, g, parallel).value;
    CHECK(a == b);
  }

  TEST_CASE("time-dependent families: correlator quadrature fallback agrees, ln Z route unsupported") {
    const auto spec = models::default_spec(models::ModelId::driven_oscillator);
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::coherent({1.0, 0.0})).state;
    const auto ci = qfi_correlator_integral(f, psi, spec.reference, 0, 1.0);
    const double gv =
        exact::qfi_generator_variance(psi, exact::duhamel_generator(f, spec.reference, 0, 1.0)).value;
    CHECK(std::abs(ci.value - gv) / gv < 1e-8);
    CHECK_FALSE(ci.metadata.warnings.empty());
    CHECK_THROWS_AS(qfi_from_lnz(f, psi, spec.reference, 0, TimeGrid(1.0, 8)), UnsupportedError);
  }
}
