#include "qfi/wigner.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qfi/errors.hpp"
#include "qfi/linalg.hpp"
#include "qfi/rng.hpp"

namespace qfi::wigner {
namespace {

GaussianStateSpec oscillator_ground(double mass, double omega, double hbar) {
  GaussianStateSpec g;
  g.hbar = hbar;
  g.mean = RealVector::Zero(2);
  g.cov = RealMatrix::Zero(2, 2);
  g.cov(0, 0) = hbar / (2.0 * mass * omega);
  g.cov(1, 1) = hbar * mass * omega / 2.0;
  return g;
}

// Second moments of the quartic ground state on its grid.
GaussianStateSpec quartic_ground_moments(const models::ModelSpec& spec) {
  const auto family = models::build_quantum(spec);
  const Spectrum spectrum(family.hamiltonian_at(spec.reference));
  const Vector psi = spectrum.vectors().col(0);
  const auto& grid = std::get<models::GridDiscretization>(spec.discretization);
  const RealVector x = models::grid_positions(grid);
  const RealVector prob = psi.cwiseAbs2();
  const Matrix kinetic = models::fourier_kinetic(grid, spec.mass, spec.hbar).cast<Complex>();
  GaussianStateSpec g;
  g.hbar = spec.hbar;
  g.exact = false;
  g.mean = RealVector::Zero(2);
  g.mean[0] = prob.dot(x);
  g.cov = RealMatrix::Zero(2, 2);
  g.cov(0, 0) = prob.dot(x.cwiseAbs2()) - g.mean[0] * g.mean[0];
  g.cov(1, 1) = 2.0 * spec.mass * psi.dot(kinetic * psi).real();
  return g;
}

}  // namespace

GaussianStateSpec gaussian_for(const models::ModelSpec& spec, const models::StateKind& kind) {
  using models::ModelId;
  using K = models::StateKind::Kind;
  const double hbar = spec.hbar;
  const double m = spec.mass;

  switch (spec.id) {
    case ModelId::qubit_phase:
    case ModelId::qubit_mixed_axis: throw UnsupportedError("qubit states have no Wigner Gaussian");
    case ModelId::harmonic:
    case ModelId::quartic:
    case ModelId::driven_oscillator: {
      const double w = spec.id == ModelId::harmonic ? spec.reference[0] : spec.omega;
      if (kind.kind == K::gaussian) {
        GaussianStateSpec g{kind.mean, kind.cov, hbar, true};
        validate(g);
        return g;
      }
      if (kind.kind == K::plus) throw ValidationError("the plus state is defined for qubit models only");
      if (spec.id == ModelId::quartic && kind.kind == K::ground) return quartic_ground_moments(spec);
      GaussianStateSpec g = oscillator_ground(m, w, hbar);
      if (kind.kind == K::coherent) {
        g.mean[0] = std::sqrt(2.0 * hbar / (m * w)) * kind.alpha.real();
        g.mean[1] = std::sqrt(2.0 * hbar * m * w) * kind.alpha.imag();
      }
      return g;
    }
    case ModelId::lattice_scalar: {
      if (kind.kind != K::ground) throw ValidationError("lattice_scalar supports the ground state only");
      const int n = std::get<models::LatticeDiscretization>(spec.discretization).sites;
      const Eigen::SelfAdjointEigenSolver<RealMatrix> es(models::lattice_coupling(n, spec.reference[0]));
      if (es.eigenvalues().minCoeff() <= 0.0) {
        throw ValidationError("lattice coupling is not positive definite; no Gaussian ground state");
      }
      const RealVector w = es.eigenvalues().cwiseSqrt();
      const RealMatrix& o = es.eigenvectors();
      GaussianStateSpec g;
      g.hbar = hbar;
      g.exact = spec.reference[1] == 0.0;
      g.mean = RealVector::Zero(2 * n);
      g.cov = RealMatrix::Zero(2 * n, 2 * n);
      g.cov.topLeftCorner(n, n) = o * (hbar / 2.0 * w.cwiseInverse()).asDiagonal() * o.transpose();
      g.cov.bottomRightCorner(n, n) = o * (hbar / 2.0 * w).asDiagonal() * o.transpose();
      return g;
    }
  }
  throw ValidationError("unsupported model");
}

double uncertainty_margin(const GaussianStateSpec& spec) {
  const int r = spec.dof();
  Matrix s = spec.cov.cast<Complex>();
  const Complex half(0.0, spec.hbar / 2.0);
  for (int i = 0; i < r; ++i) {
    s(i, r + i) += half;
    s(r + i, i) -= half;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void validate(const GaussianStateSpec& spec, double tol) {
  const auto n = spec.mean.size();
  if (n == 0 || n % 2 != 0) throw ValidationError("Gaussian mean must have even, nonzero length");
  if (spec.cov.rows() != n || spec.cov.cols() != n) throw ValidationError("Gaussian covariance has the wrong shape");
  if (!spec.mean.allFinite() || !spec.cov.allFinite()) throw ValidationError("Gaussian moments must be finite");
  if (!(spec.hbar > 0.0)) throw ValidationError("hbar must be positive");
  const double scale = std::max(1.0, spec.cov.cwiseAbs().maxCoeff());
  if ((spec.cov - spec.cov.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw ValidationError("Gaussian covariance is not symmetric");
  }
  const Eigen::LLT<RealMatrix> llt(spec.cov);
  if (llt.info() != Eigen::Success) throw ValidationError("Gaussian covariance is not positive definite");
  const double margin = uncertainty_margin(spec);
  if (margin < -tol * std::max(1.0, spec.hbar)) {
    throw ValidationError("covariance violates the uncertainty relation (margin " + std::to_string(margin) + ")");
  }
}

GaussianSampler::GaussianSampler(const GaussianStateSpec& spec) : dof_(spec.dof()), mean_(spec.mean) {
  const Eigen::LLT<RealMatrix> llt(spec.cov);
  if (llt.info() != Eigen::Success) throw ValidationError("Gaussian covariance is not positive definite");
  chol_ = llt.matrixL();
}

void GaussianSampler::fill(std::uint64_t seed, std::uint64_t index, std::span<double> out) const {
  const auto n = mean_.size();
  CounterRng rng(seed, index);
  RealVector z(n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    double a = 0.0, b = 0.0;
    rng.normal_pair(a, b);
    z[i] = a;
    if (i + 1 < n) z[i + 1] = b;
  }
  const RealVector x = mean_ + chol_.triangularView<Eigen::Lower>() * z;
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = x[i];
}

classical::PhaseSpacePoint GaussianSampler::at(std::uint64_t seed, std::uint64_t index) const {
  std::vector<double> x(static_cast<std::size_t>(2 * dof_));
  fill(seed, index, x);
  classical::PhaseSpacePoint pt;
  pt.q.assign(x.begin(), x.begin() + dof_);
  pt.p.assign(x.begin() + dof_, x.end());
  return pt;
}

std::vector<classical::PhaseSpacePoint> sample(const GaussianStateSpec& spec, std::size_t n, std::uint64_t seed) {
  const GaussianSampler sampler(spec);
  std::vector<classical::PhaseSpacePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.at(seed, i));
  return out;
}

}  // namespace qfi::wigner
