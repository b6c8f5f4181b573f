#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qfi/errors.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/linalg.hpp"
#include "qfi/models.hpp"

using namespace qfi;
using namespace qfi::exact;

namespace {

Params one(double x) { return Params::Constant(1, x); }

models::ModelSpec small_harmonic() {
  auto spec = models::default_spec(models::ModelId::harmonic);
  std::get<models::GridDiscretization>(spec.discretization).points = 128;
  return spec;
}

}  // namespace

TEST_SUITE("exact-engine") {
  TEST_CASE("zero Hamiltonian is the identity map") {
    const auto f = test::linear_family(Matrix::Zero(2, 2), {Matrix::Zero(2, 2)});
    const auto psi = test::random_state(2, 1);
    const auto out = propagate(f, one(0.0), 0.0, 3.7, psi);
    CHECK((out.amplitudes() - psi.amplitudes()).norm() < 1e-14);
  }

  TEST_CASE("diagonal phase evolution") {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = 1.0;
    const auto f = test::linear_family(h, {Matrix::Zero(2, 2)});
    Vector e0(2), e1(2);
    e0 << 1.0, 0.0;
    e1 << 0.0, 1.0;
    const auto a = propagate(f, one(0.0), 0.0, std::numbers::pi, QuantumState(e0));
    const auto b = propagate(f, one(0.0), 0.0, std::numbers::pi, QuantumState(e1));
    CHECK((a.amplitudes() - e0).norm() < 1e-12);
    CHECK((b.amplitudes() + e1).norm() < 1e-12);
  }

  TEST_CASE("random 8x8 evolution is unitary and conserves energy") {
    const Matrix h = test::random_hermitian(8, 11);
    const auto f = test::linear_family(h, {Matrix::Zero(8, 8)});
    const Matrix u = propagator(f, one(0.0), 0.0, 1.3);
    CHECK((u.adjoint() * u - Matrix::Identity(8, 8)).norm() < 1e-10);
    const auto psi = test::random_state(8, 2);
    const auto out = propagate(f, one(0.0), 0.0, 1.3, psi);
    CHECK(std::abs(out.expectation(h) - psi.expectation(h)) < 1e-10);
  }

  TEST_CASE("non-Hermitian Hamiltonian is rejected") {
    Matrix h = test::sigma_x();
    h(0, 1) = Complex(0.0, 1.0);
    const auto f = test::linear_family(h, {test::sigma_z()});
    CHECK_THROWS_AS(propagate(f, one(0.0), 0.0, 1.0, test::plus_state()), ValidationError);
  }

  TEST_CASE("commuting deformation gives G = t dH / hbar") {
    const auto f = test::linear_family(Matrix::Zero(2, 2), {0.5 * test::sigma_z()});
    const auto g = duhamel_generator(f, one(1.0), 0, 1.7);
    CHECK(g.commuting);
    CHECK((g.matrix - 1.7 * 0.5 * test::sigma_z()).norm() < 1e-14);
  }

  TEST_CASE("vanishing deformation gives G = 0") {
    const auto f = test::linear_family(test::sigma_x(), {Matrix::Zero(2, 2)});
    CHECK(duhamel_generator(f, one(0.2), 0, 2.0).matrix.norm() == 0.0);
  }

  TEST_CASE("Duhamel generator matches i U^dagger dU/dlambda by finite differences") {
    const auto f = test::linear_family(test::sigma_z(), {test::sigma_x()});
    const double t = 2.0, l = 0.3, h = 1e-5;
    const auto g = duhamel_generator(f, one(l), 0, t);
    auto du = [&](double step) {
      return Matrix((propagator(f, one(l + step), 0.0, t) - propagator(f, one(l - step), 0.0, t)) / (2.0 * step));
    };
    const Matrix d = (4.0 * du(h) - du(2.0 * h)) / 3.0;
    const Matrix oracle = Complex(0.0, 1.0) * propagator(f, one(l), 0.0, t).adjoint() * d;
    CHECK((g.matrix - oracle).norm() < 1e-7);
  }

  TEST_CASE("generator variance vanishes on an eigenvector of G") {
    const auto f = test::linear_family(Matrix::Zero(2, 2), {0.5 * test::sigma_z()});
    Vector up(2);
    up << 1.0, 0.0;
    CHECK(qfi_generator_variance(QuantumState(up), duhamel_generator(f, one(1.0), 0, 1.0)).value == 0.0);
  }

  TEST_CASE("qubit phase oracle F = t^2 for all exact routes") {
    const auto spec = models::default_spec(models::ModelId::qubit_phase);
    const auto f = models::build_quantum(spec);
    const auto psi = test::plus_state();
    for (double t : {0.5, 1.0, 2.0}) {
      CHECK(qfi_generator_variance(psi, duhamel_generator(f, spec.reference, 0, t)).value ==
            doctest::Approx(t * t).epsilon(1e-12));
      CHECK(std::abs(qfi_overlap_fd(f, psi, spec.reference, 0, t).value - t * t) < 1e-6);
    }
  }

  TEST_CASE("harmonic force oracle 4(1 - cos t) at t = pi") {
    const auto spec = models::default_spec(models::ModelId::harmonic);
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::ground()).state;
    const double v = qfi_generator_variance(psi, duhamel_generator(f, spec.reference, 1, std::numbers::pi)).value;
    CHECK(std::abs(v - 8.0) / 8.0 < 1e-3);
  }

  TEST_CASE("overlap route: parameter-free family and global phase invariance") {
    const auto flat = test::linear_family(test::sigma_x(), {Matrix::Zero(2, 2)});
    CHECK(std::abs(qfi_overlap_fd(flat, test::plus_state(), one(0.0), 0, 1.0).value) < 1e-10);

    const auto f = test::linear_family(test::sigma_z(), {test::sigma_x()});
    const auto psi = test::random_state(2, 9);
    const auto rotated = QuantumState(psi.amplitudes() * std::polar(1.0, 0.7));
    const double a = qfi_overlap_fd(f, psi, one(0.3), 0, 2.0).value;
    const double b = qfi_overlap_fd(f, rotated, one(0.3), 0, 2.0).value;
    CHECK(std::abs(a - b) < 1e-10);
  }

  TEST_CASE("overlap route warns on a step below the round-off floor") {
    const auto f = test::linear_family(test::sigma_z(), {test::sigma_x()});
    const auto e = qfi_overlap_fd(f, test::plus_state(), one(0.3), 0, 1.0, 1e-10);
    CHECK_FALSE(e.metadata.warnings.empty());
  }

  TEST_CASE("QFIM diagonal consistency for M = 1") {
    const auto f = test::linear_family(test::sigma_z(), {test::sigma_x()});
    const auto psi = test::random_state(2, 4);
    const auto m = qfim(f, psi, one(0.3), 1.5);
    const auto s = qfi_generator_variance(psi, duhamel_generator(f, one(0.3), 0, 1.5));
    CHECK(m.value(0, 0) == s.value);
  }

  TEST_CASE("QFIM of commuting deformations on a joint eigenvector is zero") {
    Matrix d1 = Matrix::Zero(3, 3), d2 = Matrix::Zero(3, 3);
    d1.diagonal() << 1.0, 2.0, 3.0;
    d2.diagonal() << -1.0, 0.5, 4.0;
    const auto f = test::linear_family(d1, {d1, d2});
    Vector e(3);
    e << 0.0, 1.0, 0.0;
    const auto m = qfim(f, QuantumState(e), Params::Constant(2, 0.1), 2.0);
    CHECK(m.value.cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("harmonic (omega, force) QFIM is symmetric and PSD") {
    const auto spec = small_harmonic();
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::coherent({1.0, 0.5})).state;
    const auto m = qfim(f, psi, spec.reference, 1.2);
    CHECK((m.value - m.value.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.value);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }

  TEST_CASE("insertion-as-operator residual") {
    const auto flat = test::linear_family(test::sigma_x(), {Matrix::Zero(2, 2)});
    CHECK(insertion_amplitude_check(flat, test::plus_state(), one(0.0), 0, 1.0) < 1e-12);

    const auto mixed = models::default_spec(models::ModelId::qubit_mixed_axis);
    CHECK(insertion_amplitude_check(models::build_quantum(mixed), test::plus_state(), mixed.reference, 0, 2.0) <
          1e-6);

    const auto spec = small_harmonic();
    const auto psi = models::initial_state(spec, models::StateKind::ground()).state;
    CHECK(insertion_amplitude_check(models::build_quantum(spec), psi, spec.reference, 0, 1.0) < 1e-5);
  }

  TEST_CASE("driven oscillator: commutator-free slicing reproduces the classical centroid") {
    // For a linear drive the centroid follows the classical equation exactly:
    // x(t) = (A / (ω²−Ω²)) (sin Ωt − (Ω/ω) sin ωt) from rest at the origin.
    auto spec = models::default_spec(models::ModelId::driven_oscillator);
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::ground()).state;
    const double a = spec.reference[0], w = 1.3, t = 2.5;
    const auto out = propagate(f, spec.reference, 0.0, t, psi);
    const int d = static_cast<int>(f.dim());
    Matrix x = Matrix::Zero(d, d);
    for (int k = 1; k < d; ++k) x(k - 1, k) = x(k, k - 1) = std::sqrt(k / 2.0);
    const double expected = a / (1.0 - w * w) * (std::sin(w * t) - w * std::sin(t));
    CHECK(std::abs(out.expectation(x).real() - expected) < 1e-8);
  }

  TEST_CASE("time-dependent propagation is norm preserving and composes") {
    const auto spec = models::default_spec(models::ModelId::driven_oscillator);
    const auto f = models::build_quantum(spec);
    const auto psi = models::initial_state(spec, models::StateKind::coherent({1.0, 0.0})).state;
    const auto direct = propagate(f, spec.reference, 0.0, 2.0, psi);
    const auto split = propagate(f, spec.reference, 1.1, 2.0, propagate(f, spec.reference, 0.0, 1.1, psi));
    CHECK(std::abs(direct.amplitudes().norm() - 1.0) < 1e-12);
    CHECK((direct.amplitudes() - split.amplitudes()).norm() < 1e-8);
  }

  TEST_CASE("dimension cap is enforced") {
    const auto f = test::linear_family(test::sigma_z(), {test::sigma_x()});
    Options opts;
    opts.dim_cap = 1;
    CHECK_THROWS_AS(propagate(f, one(0.0), 0.0, 1.0, test::plus_state(), opts), ResourceError);
  }

  TEST_CASE("slicing that cannot converge raises a convergence error with its residual") {
    const auto spec = models::default_spec(models::ModelId::driven_oscillator);
    const auto f = models::build_quantum(spec);
    Options opts;
    opts.slicing_tolerance = 1e-30;
    opts.max_slice_doublings = 2;
    try {
      (void)propagate(f, spec.reference, 0.0, 5.0, models::initial_state(spec, models::StateKind::ground()).state,
                      opts);
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(e.residual() > 0.0);
    }
  }
}
