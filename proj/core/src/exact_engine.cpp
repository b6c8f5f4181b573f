#include "qfi/exact_engine.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "qfi/errors.hpp"
#include "qfi/linalg.hpp"
#include "qfi/quadrature.hpp"

namespace qfi::exact {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_dimension(const HamiltonianFamily& family, const Options& options) {
  if (family.dim() > options.dim_cap) {
    throw ResourceError("family '" + family.id() + "' has dimension " + std::to_string(family.dim()) +
                        ", above the cap of " + std::to_string(options.dim_cap));
  }
}

void check_state(const HamiltonianFamily& family, const Vector& v) {
  if (v.size() != family.dim()) {
    throw ValidationError("state dimension " + std::to_string(v.size()) + " does not match family dimension " +
                          std::to_string(family.dim()));
  }
}

// Fourth-order commutator-free exponential step (two exponentials, Gauss
// nodes c = 1/2 ∓ √3/6).
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kNodeA = 0.5 - kSqrt3 / 6.0;
constexpr double kNodeB = 0.5 + kSqrt3 / 6.0;
constexpr double kWeightSmall = (3.0 - 2.0 * kSqrt3) / 12.0;
constexpr double kWeightLarge = (3.0 + 2.0 * kSqrt3) / 12.0;

Matrix apply_exponential(const Matrix& generator, double h, double hbar, const Matrix& payload) {
  const Spectrum spectrum(generator);
  Matrix c = spectrum.vectors().adjoint() * payload;
  for (Eigen::Index k = 0; k < spectrum.dim(); ++k) {
    c.row(k) *= std::polar(1.0, -spectrum.values()[k] * h / hbar);
  }
  return spectrum.vectors() * c;
}

Matrix sliced_evolution(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                        const Matrix& payload, int steps) {
  const double h = (t1 - t0) / steps;
  Matrix out = payload;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const Matrix ha = family.hamiltonian_at(lambda, t + kNodeA * h);
    const Matrix hb = family.hamiltonian_at(lambda, t + kNodeB * h);
    out = apply_exponential(kWeightLarge * ha + kWeightSmall * hb, h, family.hbar(), out);
    out = apply_exponential(kWeightSmall * ha + kWeightLarge * hb, h, family.hbar(), out);
  }
  return out;
}

double max_column_distance(const Matrix& a, const Matrix& b) {
  return (a - b).colwise().norm().maxCoeff();
}

// Evolves every column of `payload` from t0 to t1.
Matrix evolve_columns(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                      const Matrix& payload, const Options& options) {
  if (t1 < t0) throw ValidationError("propagation requires t1 >= t0");
  check_dimension(family, options);
  if (payload.rows() != family.dim()) throw ValidationError("payload dimension mismatch");
  if (t1 == t0) return payload;
  if (!family.time_dependent()) {
    const Spectrum spectrum(family.hamiltonian_at(lambda));
    Matrix c = spectrum.vectors().adjoint() * payload;
    for (Eigen::Index k = 0; k < spectrum.dim(); ++k) {
      c.row(k) *= std::polar(1.0, -spectrum.values()[k] * (t1 - t0) / family.hbar());
    }
    return spectrum.vectors() * c;
  }
  int steps = std::max(1, options.initial_slices);
  Matrix coarse = sliced_evolution(family, lambda, t0, t1, payload, steps);
  double residual = std::numeric_limits<double>::infinity();
  for (int d = 0; d < options.max_slice_doublings; ++d) {
    steps *= 2;
    Matrix fine = sliced_evolution(family, lambda, t0, t1, payload, steps);
    residual = max_column_distance(fine, coarse);
    if (residual < options.slicing_tolerance) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("time slicing did not converge for '" + family.id() + "'", residual);
}

Vector evolve_vector(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                     const Vector& v, const Options& options) {
  check_state(family, v);
  return evolve_columns(family, lambda, t0, t1, v, options).col(0);
}

EstimateMetadata base_metadata(const HamiltonianFamily& family, const Params& lambda, std::size_t parameter,
                               double t) {
  EstimateMetadata m;
  m.model = family.id();
  m.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  m.parameter = parameter;
  m.t = t;
  m.discretization = family.discretization();
  return m;
}

DeformationGenerator static_generator(const HamiltonianFamily& family, const Params& lambda,
                                      std::size_t parameter, double t, int quad_order,
                                      const Options& options) {
  const Matrix h = family.hamiltonian_at(lambda);
  const Matrix dh = family.deformation_at(lambda, parameter);
  DeformationGenerator gen{Matrix::Zero(family.dim(), family.dim()), t, lambda, parameter, 0, false};
  if (commutator(h, dh).norm() < 1e-12) {
    gen.matrix = dh * (t / family.hbar());
    gen.commuting = true;
    return gen;
  }
  const Spectrum spectrum(h);
  const Matrix b = spectrum.to_eigenbasis(dh);
  const Eigen::Index n = family.dim();
  Matrix previous;
  int order = quad_order;
  double residual = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= options.max_quadrature_doublings; ++d, order *= 2) {
    const QuadratureRule rule = gauss_legendre(order, 0.0, t);
    Matrix weights = Matrix::Zero(n, n);
    Vector phase(n);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        phase[k] = std::polar(1.0, spectrum.values()[k] * rule.nodes[j] / family.hbar());
      }
      weights.noalias() += rule.weights[j] * (phase * phase.adjoint());
    }
    Matrix current = b.cwiseProduct(weights) / family.hbar();
    if (previous.size() != 0) {
      residual = (current - previous).norm() / std::max(1.0, current.norm());
      if (residual < options.quadrature_tolerance) {
        gen.matrix = spectrum.from_eigenbasis(current);
        gen.matrix = 0.5 * (gen.matrix + gen.matrix.adjoint()).eval();
        gen.quadrature_nodes = order;
        return gen;
      }
    }
    previous = std::move(current);
  }
  throw ConvergenceError("Duhamel quadrature did not converge", residual);
}

DeformationGenerator driven_generator(const HamiltonianFamily& family, const Params& lambda,
                                      std::size_t parameter, double t, int quad_order,
                                      const Options& options) {
  DeformationGenerator gen{Matrix::Zero(family.dim(), family.dim()), t, lambda, parameter, 0, false};
  const Eigen::Index n = family.dim();
  Matrix previous;
  int order = quad_order;
  double residual = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= options.max_quadrature_doublings; ++d, order *= 2) {
    const QuadratureRule rule = gauss_legendre(order, 0.0, t);
    Matrix current = Matrix::Zero(n, n);
    Matrix u = Matrix::Identity(n, n);
    double last = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      u = evolve_columns(family, lambda, last, rule.nodes[j], u, options);
      last = rule.nodes[j];
      const Matrix dh = family.deformation_at(lambda, parameter, rule.nodes[j]);
      current.noalias() += rule.weights[j] * (u.adjoint() * dh * u);
    }
    current /= family.hbar();
    if (previous.size() != 0) {
      residual = (current - previous).norm() / std::max(1.0, current.norm());
      if (residual < options.quadrature_tolerance) {
        gen.matrix = 0.5 * (current + current.adjoint());
        gen.quadrature_nodes = order;
        return gen;
      }
    }
    previous = std::move(current);
  }
  throw ConvergenceError("Duhamel quadrature did not converge", residual);
}

}  // namespace

double default_step(double x, const Options& options) {
  return options.dlambda_rel * std::max(1.0, std::abs(x));
}

QuantumState propagate(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                       const QuantumState& state, const Options& options) {
  Vector out = evolve_vector(family, lambda, t0, t1, state.amplitudes(), options);
  const double drift = std::abs(out.norm() - 1.0);
  if (drift > 1e-10) {
    throw InternalConsistencyError("propagation lost normalization (" + std::to_string(drift) + ")");
  }
  // Re-normalize away the sub-1e-10 round-off so the state invariant holds.
  return QuantumState::normalized(std::move(out));
}

Matrix propagator(const HamiltonianFamily& family, const Params& lambda, double t0, double t1,
                  const Options& options) {
  return evolve_columns(family, lambda, t0, t1, Matrix::Identity(family.dim(), family.dim()), options);
}

DeformationGenerator duhamel_generator(const HamiltonianFamily& family, const Params& lambda,
                                       std::size_t parameter, double t, int quad_order,
                                       const Options& options) {
  if (t < 0.0) throw ValidationError("generator time must be nonnegative");
  if (quad_order < 2) throw ValidationError("quadrature order must be at least 2");
  if (parameter >= family.num_parameters()) throw ValidationError("parameter index out of range");
  check_dimension(family, options);
  if (t == 0.0) {
    return {Matrix::Zero(family.dim(), family.dim()), 0.0, lambda, parameter, 0, false};
  }
  DeformationGenerator gen = family.time_dependent()
                                 ? driven_generator(family, lambda, parameter, t, quad_order, options)
                                 : static_generator(family, lambda, parameter, t, quad_order, options);
  if (hermiticity_defect(gen.matrix) > 1e-10) {
    throw InternalConsistencyError("Duhamel generator is not Hermitian");
  }
  return gen;
}

double generator_covariance(const Vector& u, const Vector& v, double mean_u, double mean_v) {
  return 4.0 * (u.dot(v).real() - mean_u * mean_v);
}

QfiEstimate qfi_generator_variance(const QuantumState& state0, const DeformationGenerator& generator) {
  const auto start = Clock::now();
  if (generator.matrix.rows() != state0.dim()) throw ValidationError("generator/state dimension mismatch");
  const Vector u = generator.matrix * state0.amplitudes();
  const double mean = state0.amplitudes().dot(u).real();
  QfiEstimate est;
  est.method = QfiMethod::generator_variance;
  est.metadata.lambda.assign(generator.lambda.data(), generator.lambda.data() + generator.lambda.size());
  est.metadata.parameter = generator.parameter;
  est.metadata.t = generator.t;
  est.metadata.tolerances["quadrature_nodes"] = generator.quadrature_nodes;
  est.value = clamp_qfi(generator_covariance(u, u, mean, mean), est.metadata);
  est.metadata.runtime_ms = elapsed_ms(start);
  return est;
}

Vector state_derivative(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                        std::size_t parameter, double t, double step, const Options& options) {
  if (parameter >= family.num_parameters()) throw ValidationError("parameter index out of range");
  auto shifted = [&](double delta) {
    Params p = lambda;
    p[static_cast<Eigen::Index>(parameter)] += delta;
    return evolve_vector(family, p, 0.0, t, state0.amplitudes(), options);
  };
  const Vector d1 = (shifted(step) - shifted(-step)) / (2.0 * step);
  const Vector d2 = (shifted(2.0 * step) - shifted(-2.0 * step)) / (4.0 * step);
  return (4.0 * d1 - d2) / 3.0;
}

QfiEstimate qfi_overlap_fd(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                           std::size_t parameter, double t, std::optional<double> dlambda,
                           const Options& options) {
  const auto start = Clock::now();
  if (parameter >= family.num_parameters()) throw ValidationError("parameter index out of range");
  check_state(family, state0.amplitudes());
  const double step = dlambda.value_or(default_step(lambda[static_cast<Eigen::Index>(parameter)], options));
  if (!(step > 0.0)) throw ValidationError("dlambda must be positive");
  QfiEstimate est;
  est.method = QfiMethod::overlap_fd;
  est.metadata = base_metadata(family, lambda, parameter, t);
  est.metadata.tolerances["dlambda"] = step;
  if (step <= options.dlambda_floor) {
    est.metadata.warnings.push_back("dlambda " + std::to_string(step) + " is at or below the round-off floor");
  }
  const Vector psi = evolve_vector(family, lambda, 0.0, t, state0.amplitudes(), options);
  const Vector dpsi = state_derivative(family, state0, lambda, parameter, t, step, options);
  const double raw = 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
  est.value = clamp_qfi(raw, est.metadata);
  est.metadata.runtime_ms = elapsed_ms(start);
  return est;
}

QfimEstimate qfim(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda, double t,
                  const Options& options) {
  const auto start = Clock::now();
  check_state(family, state0.amplitudes());
  const std::size_t m = family.num_parameters();
  std::vector<Vector> images;
  std::vector<double> means;
  int nodes = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto gen = duhamel_generator(family, lambda, i, t, 16, options);
    nodes = std::max(nodes, gen.quadrature_nodes);
    images.push_back(gen.matrix * state0.amplitudes());
    means.push_back(state0.amplitudes().dot(images.back()).real());
  }
  QfimEstimate est;
  est.method = QfiMethod::generator_variance;
  est.metadata = base_metadata(family, lambda, 0, t);
  est.metadata.tolerances["quadrature_nodes"] = nodes;
  const auto sz = static_cast<Eigen::Index>(m);
  est.value = RealMatrix::Zero(sz, sz);
  for (Eigen::Index i = 0; i < sz; ++i) {
    for (Eigen::Index j = i; j < sz; ++j) {
      double v = generator_covariance(images[i], images[j], means[i], means[j]);
      if (i == j) v = clamp_qfi(v, est.metadata);
      est.value(i, j) = v;
      est.value(j, i) = v;
    }
  }
  est.metadata.runtime_ms = elapsed_ms(start);
  return est;
}

double insertion_amplitude_check(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                                 std::size_t parameter, double t, const Options& options) {
  const double step = default_step(lambda[static_cast<Eigen::Index>(parameter)], options);
  const double hbar = family.hbar();
  const Vector lhs = Complex(0.0, -hbar) * state_derivative(family, state0, lambda, parameter, t, step, options);
  const auto gen = duhamel_generator(family, lambda, parameter, t, 16, options);
  const Vector rhs = -hbar * evolve_vector(family, lambda, 0.0, t, gen.matrix * state0.amplitudes(), options);
  return (lhs - rhs).norm();
}

}  // namespace qfi::exact
