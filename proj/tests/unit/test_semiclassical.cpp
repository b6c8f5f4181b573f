#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfi/compare.hpp"
#include "qfi/errors.hpp"
#include "qfi/models.hpp"
#include "qfi/rng.hpp"
#include "qfi/semiclassical.hpp"
#include "qfi/wigner.hpp"

using namespace qfi;
using namespace qfi::sc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Harmonic {
  models::ModelSpec spec = models::default_spec(models::ModelId::harmonic);
  classical::ClassicalModel model = models::build_classical(spec);
  GaussianStateSpec ground = wigner::gaussian_for(spec, models::StateKind::ground());
  classical::StepperConfig cfg = classical::default_stepper(model);
};

/// Two uncoupled unit oscillators with one force parameter each.
classical::ClassicalModel decoupled_pair() {
  classical::ClassicalModel m;
  m.id = "pair";
  m.dof = 2;
  m.labels = {"f1", "f2"};
  m.potential = [](classical::ConstSpan q, const Params& l, double) {
    return 0.5 * (q[0] * q[0] + q[1] * q[1]) - l[0] * q[0] - l[1] * q[1];
  };
  m.force = [](classical::ConstSpan q, const Params& l, double, classical::MutSpan f) {
    f[0] = -q[0] + l[0];
    f[1] = -q[1] + l[1];
  };
  m.dlagrangian = [](classical::ConstSpan q, classical::ConstSpan, const Params&, double, classical::MutSpan out) {
    out[0] = q[0];
    out[1] = q[1];
  };
  return m;
}

}  // namespace

TEST_SUITE("sc-estimator") {
  TEST_CASE("lambda-independent model gives zero") {
    classical::ClassicalModel m = decoupled_pair();
    m.dlagrangian = [](classical::ConstSpan, classical::ConstSpan, const Params&, double, classical::MutSpan out) {
      out[0] = 0.0;
      out[1] = 0.0;
    };
    GaussianStateSpec g;
    g.mean = RealVector::Zero(4);
    g.cov = 0.5 * RealMatrix::Identity(4, 4);
    const auto e = estimate_qfi_sc(m, g, Params::Zero(2), 0, 1.0, 200, {0.05, classical::Scheme::rk4}, 1);
    CHECK(e.value == 0.0);
    CHECK(*e.std_error == 0.0);
  }

  TEST_CASE("harmonic force model reproduces the closed form") {
    Harmonic h;
    const auto e = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 1, kPi, 100000, h.cfg, 21);
    REQUIRE(e.std_error.has_value());
    CHECK(std::abs(e.value - 8.0) < 4.0 * *e.std_error);
    CHECK(e.metadata.n_samples == 100000u);
    CHECK(e.metadata.seed == 21u);
  }

  TEST_CASE("bootstrap error shrinks like one over root n") {
    Harmonic h;
    const auto a = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 1, kPi, 1000, h.cfg, 4);
    const auto b = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 1, kPi, 10000, h.cfg, 4);
    const double ratio = *a.std_error / *b.std_error;
    CHECK(ratio >= 2.5);
    CHECK(ratio <= 4.0);
  }

  TEST_CASE("doubling the step moves the estimate by less than one stderr") {
    Harmonic h;
    auto coarse = h.cfg;
    coarse.dt *= 2.0;
    const auto a = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 1, kPi, 10000, h.cfg, 8);
    const auto b = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 1, kPi, 10000, coarse, 8);
    CHECK(std::abs(a.value - b.value) < *a.std_error);
  }

  TEST_CASE("estimates are seed-deterministic and thread-invariant") {
    Harmonic h;
    Options serial;
    Options parallel;
    parallel.threads = 4;
    parallel.block_size = 512;
    serial.block_size = 512;
    const auto a = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 0, 1.0, 3000, h.cfg, 5, serial);
    const auto b = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 0, 1.0, 3000, h.cfg, 5, parallel);
    const auto c = estimate_qfi_sc(h.model, h.ground, h.spec.reference, 0, 1.0, 3000, h.cfg, 5, serial);
    CHECK(a.value == b.value);
    CHECK(*a.std_error == *b.std_error);
    CHECK(a.value == c.value);
  }

  TEST_CASE("QFIM: symmetric, PSD within noise, diagonal equals the scalar estimate") {
    Harmonic h;
    const auto m = estimate_qfim_sc(h.model, h.ground, h.spec.reference, 1.0, 4000, h.cfg, 13);
    CHECK(m.value == m.value.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.value);
    CHECK(es.eigenvalues()[0] > -3.0 * m.std_error->maxCoeff());
    for (std::size_t i = 0; i < 2; ++i) {
      const auto s = estimate_qfi_sc(h.model, h.ground, h.spec.reference, i, 1.0, 4000, h.cfg, 13);
      const auto k = static_cast<Eigen::Index>(i);
      CHECK(m.value(k, k) == s.value);
    }
  }

  TEST_CASE("decoupled parameters have vanishing off-diagonal") {
    GaussianStateSpec g;
    g.mean = RealVector::Zero(4);
    g.cov = 0.5 * RealMatrix::Identity(4, 4);
    const auto m = estimate_qfim_sc(decoupled_pair(), g, Params::Zero(2), 2.0, 20000, {0.01, classical::Scheme::rk4}, 3);
    CHECK(std::abs(m.value(0, 1)) < 4.0 * (*m.std_error)(0, 1));
    const double diag = 4.0 * (1.0 - std::cos(2.0));
    CHECK(std::abs(m.value(0, 0) - diag) < 4.0 * (*m.std_error)(0, 0));
  }

  TEST_CASE("pairwise merge agrees with a two-pass covariance") {
    CounterRng rng(99, 0);
    RealMatrix x(1001, 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = 1e3 + rng.uniform() * (j + 1);
    }
    const RealMatrix centered = x.rowwise() - x.colwise().mean();
    const RealMatrix two_pass = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    for (std::size_t block : {1u, 7u, 64u, 4096u}) {
      CHECK((streaming_covariance(x, block) - two_pass).cwiseAbs().maxCoeff() < 1e-10);
    }
    Moments a(3), b(3);
    for (Eigen::Index i = 0; i < 500; ++i) a.add(x.row(i).eval().data());
    for (Eigen::Index i = 500; i < x.rows(); ++i) b.add(x.row(i).eval().data());
    CHECK((Moments::merge(a, b).covariance() - two_pass).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("trajectory failures: fail fast or drop and flag") {
    classical::ClassicalModel m = decoupled_pair();
    m.dof = 1;
    m.labels = {"f"};
    m.potential = [](classical::ConstSpan q, const Params&, double) { return -std::pow(q[0], 4); };
    m.force = [](classical::ConstSpan q, const Params&, double, classical::MutSpan f) {
      f[0] = 4.0 * std::pow(q[0], 3);
    };
    m.dlagrangian = [](classical::ConstSpan q, classical::ConstSpan, const Params&, double, classical::MutSpan out) {
      out[0] = q[0];
    };
    GaussianStateSpec g;
    g.mean = RealVector::Zero(2);
    g.cov = 0.5 * RealMatrix::Identity(2, 2);
    const classical::StepperConfig cfg{0.01, classical::Scheme::rk4};
    CHECK_THROWS_AS(estimate_qfi_sc(m, g, Params::Zero(1), 0, 3.0, 200, cfg, 1), DivergenceError);
    Options drop;
    drop.failure_policy = FailurePolicy::drop_and_flag;
    const auto e = estimate_qfi_sc(m, g, Params::Zero(1), 0, 3.0, 200, cfg, 1, drop);
    REQUIRE(e.metadata.dropped_fraction.has_value());
    CHECK(*e.metadata.dropped_fraction > 0.0);
    CHECK(*e.metadata.dropped_fraction < 1.0);
  }

  TEST_CASE("too few samples are rejected") {
    Harmonic h;
    CHECK_THROWS_AS(estimate_qfi_sc(h.model, h.ground, h.spec.reference, 0, 1.0, 50, h.cfg, 1), ValidationError);
  }
}

TEST_SUITE("compare-routes") {
  TEST_CASE("harmonic force model: all routes agree") {
    CompareRequest req;
    req.model = models::default_spec(models::ModelId::harmonic);
    req.model.discretization = models::GridDiscretization{10.0, 128};
    req.state = models::StateKind::ground();
    req.lambda = req.model.reference;
    req.parameter = 1;
    req.t = kPi;
    req.n_samples = 20000;
    req.seed = 2;
    const auto report = compare_routes(req);
    const auto* gv = report.find(QfiMethod::generator_variance);
    const auto* fd = report.find(QfiMethod::overlap_fd);
    const auto* ci = report.find(QfiMethod::correlator_integral);
    const auto* mc = report.find(QfiMethod::semiclassical_mc);
    REQUIRE((gv && fd && ci && mc));
    REQUIRE((gv->estimate && fd->estimate && ci->estimate && mc->estimate));
    CHECK(std::abs(fd->estimate->value / gv->estimate->value - 1.0) < 1e-5);
    CHECK(std::abs(ci->estimate->value / gv->estimate->value - 1.0) < 1e-5);
    CHECK(std::abs(mc->estimate->value - gv->estimate->value) < 4.0 * *mc->estimate->std_error);
    CHECK(report.discrepancies.size() == 6);
  }

  TEST_CASE("qubit: semiclassical route unsupported, exact trio agrees") {
    CompareRequest req;
    req.model = models::default_spec(models::ModelId::qubit_phase);
    req.state = models::StateKind::plus();
    req.lambda = req.model.reference;
    const auto report = compare_routes(req);
    const auto* mc = report.find(QfiMethod::semiclassical_mc);
    REQUIRE(mc != nullptr);
    CHECK_FALSE(mc->estimate.has_value());
    CHECK_FALSE(mc->error.empty());
    for (const auto& d : report.discrepancies) CHECK(d.relative < 1e-5);
  }

  TEST_CASE("quartic: exact trio agrees, semiclassical deviation is recorded") {
    CompareRequest req;
    req.model = models::default_spec(models::ModelId::quartic);
    req.model.discretization = models::GridDiscretization{10.0, 128};
    req.state = models::StateKind::ground();
    req.lambda = req.model.reference;
    req.n_samples = 2000;
    const auto report = compare_routes(req);
    for (const auto& d : report.discrepancies) {
      if (d.a != QfiMethod::semiclassical_mc && d.b != QfiMethod::semiclassical_mc) CHECK(d.relative < 1e-5);
    }
    const auto* mc = report.find(QfiMethod::semiclassical_mc);
    REQUIRE((mc && mc->estimate));
    CHECK_FALSE(mc->estimate->metadata.warnings.empty());
  }
}
