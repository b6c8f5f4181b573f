#include "qfi/correlator.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "qfi/errors.hpp"
#include "qfi/linalg.hpp"
#include "qfi/parallel.hpp"
#include "qfi/quadrature.hpp"

namespace qfi::correlator {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// I(ω) = ∫₀ᵗ e^{iωs} ds with the series branch near the removable singularity.
Complex time_integral(double omega, double t) {
  const double x = omega * t;
  if (std::abs(x) < 1e-4) return t * Complex(1.0 - x * x / 6.0, x / 2.0);
  return (std::polar(1.0, x) - 1.0) / Complex(0.0, omega);
}

// Pairwise summation in a fixed tree.
double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 0) return 0.0;
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

std::complex<double> principal_log(Complex z, double floor) {
  if (!(std::abs(z) >= floor)) {
    throw DomainError("|Z| = " + std::to_string(std::abs(z)) + " is below the logarithm floor");
  }
  return std::log(z);
}

// Shifts the imaginary part by multiples of 2π to the branch closest to `ref`.
std::complex<double> unwrap(std::complex<double> value, std::complex<double> ref) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double k = std::round((ref.imag() - value.imag()) / two_pi);
  return {value.real(), value.imag() + k * two_pi};
}

std::vector<double> trapezoid_weights(int n_slices, double h, int stride) {
  std::vector<double> w(static_cast<std::size_t>(n_slices) + 1, 0.0);
  for (int k = 0; k <= n_slices; k += stride) w[k] = stride * h;
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace

TimeGrid::TimeGrid(double t, int n_slices) : t_(t), n_slices_(n_slices) {
  if (n_slices < 2) throw ValidationError("time grid needs at least 2 slices");
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("time grid needs a positive finite total time");
}

double TimeGrid::node(int k) const {
  if (k < 0 || k > n_slices_) throw ValidationError("slice index " + std::to_string(k) + " outside the grid");
  return k == n_slices_ ? t_ : t_ * k / n_slices_;
}

Matrix heisenberg_matrix(const HamiltonianFamily& family, const Params& lambda, const Matrix& o, double t_prime,
                         const exact::Options& options) {
  if (o.rows() != family.dim() || o.cols() != family.dim()) throw ValidationError("operator dimension mismatch");
  require_hermitian(o, 1e-12, "observable");
  const Matrix u = exact::propagator(family, lambda, 0.0, t_prime, options);
  return u.adjoint() * o * u;
}

QfiEstimate qfi_correlator_integral(const HamiltonianFamily& family, const QuantumState& state0,
                                    const Params& lambda, std::size_t parameter, double t,
                                    const exact::Options& options) {
  const auto start = Clock::now();
  if (t < 0.0) throw ValidationError("time must be nonnegative");
  if (state0.dim() != family.dim()) throw ValidationError("state/family dimension mismatch");
  if (family.dim() > options.dim_cap) throw ResourceError("family dimension above the cap");
  const double hbar = family.hbar();
  QfiEstimate est;
  est.method = QfiMethod::correlator_integral;
  est.metadata.model = family.id();
  est.metadata.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  est.metadata.parameter = parameter;
  est.metadata.t = t;
  est.metadata.discretization = family.discretization();

  Matrix integrated;
  Vector psi;
  if (!family.time_dependent()) {
    const Spectrum spectrum(family.hamiltonian_at(lambda));
    const Matrix o = spectrum.to_eigenbasis(Matrix(-family.deformation_at(lambda, parameter)));
    const Eigen::Index n = family.dim();
    integrated.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        const double omega = (spectrum.values()[a] - spectrum.values()[b]) / hbar;
        integrated(a, b) = o(a, b) * time_integral(omega, t);
      }
    }
    psi = spectrum.to_eigenbasis(state0.amplitudes());
  } else {
    // Quadrature of ô_H(t′) with node-to-node propagation.
    est.metadata.warnings.push_back("time-dependent family: quadrature fallback for the time integral");
    Matrix previous;
    int order = 16;
    double residual = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= options.max_quadrature_doublings; ++d, order *= 2) {
      const QuadratureRule rule = gauss_legendre(order, 0.0, t);
      Matrix current = Matrix::Zero(family.dim(), family.dim());
      Matrix u = Matrix::Identity(family.dim(), family.dim());
      double last = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        u = exact::propagator(family, lambda, last, rule.nodes[j], options) * u;
        last = rule.nodes[j];
        current.noalias() -= rule.weights[j] * (u.adjoint() * family.deformation_at(lambda, parameter, last) * u);
      }
      if (previous.size() != 0) {
        residual = (current - previous).norm() / std::max(1.0, current.norm());
        if (residual < options.quadrature_tolerance) {
          integrated = std::move(current);
          break;
        }
      }
      previous = std::move(current);
    }
    if (integrated.size() == 0) throw ConvergenceError("correlator quadrature did not converge", residual);
    est.metadata.tolerances["quadrature_nodes"] = order;
    psi = state0.amplitudes();
  }
  if (hermiticity_defect(integrated) > 1e-10) {
    throw InternalConsistencyError("time-integrated deformation operator is not Hermitian");
  }
  const Vector u = integrated * psi;
  const double mean = psi.dot(u).real();
  est.value = clamp_qfi(4.0 / (hbar * hbar) * (u.squaredNorm() - mean * mean), est.metadata);
  est.metadata.runtime_ms = elapsed_ms(start);
  return est;
}

// ---------------------------------------------------------------------------

struct Contour::Impl {
  TimeGrid grid;
  double hbar;
  double z_floor;
  bool time_dependent;
  std::optional<Spectrum> h_spectrum;
  std::vector<Matrix> node_propagators;  // U(t_k, 0), time-dependent families only
  std::vector<Vector> forward;           // U(t_k, 0)|ψ₀⟩
  std::vector<Matrix> observables;       // ô at each node
  std::vector<Spectrum> kick_spectra;    // one entry if ô is constant

  Impl(const TimeGrid& g, double h, double floor) : grid(g), hbar(h), z_floor(floor), time_dependent(false) {}

  const Spectrum& kick_spectrum(int k) const { return kick_spectra.size() == 1 ? kick_spectra[0] : kick_spectra[k]; }
  const Matrix& observable(int k) const { return observables.size() == 1 ? observables[0] : observables[k]; }

  Vector evolve(const Vector& v, int from, int to) const {
    if (from == to) return v;
    if (!time_dependent) return h_spectrum->evolve(v, grid.node(to) - grid.node(from), hbar);
    return node_propagators[to] * (node_propagators[from].adjoint() * v);
  }

  Vector kick(const Vector& v, int k, double strength) const { return kick_spectrum(k).exp_i(v, strength / hbar); }

  Vector branch_state(const SourceProfile& profile) const {
    std::vector<Kick> kicks = profile.kicks;
    for (const auto& kk : kicks) {
      if (kk.slice < 0 || kk.slice > grid.n_slices()) {
        throw ValidationError("kick slice " + std::to_string(kk.slice) + " outside the time grid");
      }
      if (!std::isfinite(kk.strength)) throw ValidationError("kick strength must be finite");
    }
    std::stable_sort(kicks.begin(), kicks.end(), [](const Kick& a, const Kick& b) { return a.slice < b.slice; });
    if (kicks.empty()) return forward.back();
    Vector v = forward[kicks.front().slice];
    int current = kicks.front().slice;
    for (const auto& kk : kicks) {
      v = evolve(v, current, kk.slice);
      current = kk.slice;
      v = kick(v, kk.slice, kk.strength);
    }
    return evolve(v, current, grid.n_slices());
  }

  Vector single_kick_state(int k, double strength) const {
    return evolve(kick(forward[k], k, strength), k, grid.n_slices());
  }
};

Contour::Contour(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                 const TimeGrid& grid, const Matrix& o, const Options& options)
    : impl_(std::make_unique<Impl>(grid, family.hbar(), options.z_floor)) {
  if (state0.dim() != family.dim()) throw ValidationError("state/family dimension mismatch");
  if (o.rows() != family.dim() || o.cols() != family.dim()) throw ValidationError("observable dimension mismatch");
  if (family.dim() > options.exact.dim_cap) throw ResourceError("family dimension above the cap");
  require_hermitian(o, 1e-12, "observable");
  impl_->observables.push_back(o);
  impl_->kick_spectra.emplace_back(o);
  impl_->time_dependent = family.time_dependent();
  const int nodes = grid.n_nodes();
  impl_->forward.reserve(nodes);
  if (!impl_->time_dependent) {
    impl_->h_spectrum.emplace(family.hamiltonian_at(lambda));
    for (int k = 0; k < nodes; ++k) {
      impl_->forward.push_back(impl_->h_spectrum->evolve(state0.amplitudes(), grid.node(k), family.hbar()));
    }
  } else {
    Matrix u = Matrix::Identity(family.dim(), family.dim());
    impl_->node_propagators.push_back(u);
    for (int k = 1; k < nodes; ++k) {
      u = exact::propagator(family, lambda, grid.node(k - 1), grid.node(k), options.exact) * u;
      impl_->node_propagators.push_back(u);
    }
    for (int k = 0; k < nodes; ++k) impl_->forward.push_back(impl_->node_propagators[k] * state0.amplitudes());
  }
}

Contour::~Contour() = default;
Contour::Contour(Contour&&) noexcept = default;
Contour& Contour::operator=(Contour&&) noexcept = default;

const TimeGrid& Contour::grid() const noexcept { return impl_->grid; }
const Vector& Contour::final_state() const { return impl_->forward.back(); }
Vector Contour::single_kick_state(int k, double strength) const {
  if (k < 0 || k > impl_->grid.n_slices()) throw ValidationError("slice index outside the grid");
  return impl_->single_kick_state(k, strength);
}
double Contour::hbar() const noexcept { return impl_->hbar; }

std::complex<double> Contour::z(const SourceProfile& plus, const SourceProfile& minus) const {
  if (plus.branch != Branch::plus || minus.branch != Branch::minus) {
    throw ValidationError("source profiles must be given as (plus, minus)");
  }
  return impl_->branch_state(minus).dot(impl_->branch_state(plus));
}

std::complex<double> Contour::log_z(const SourceProfile& plus, const SourceProfile& minus) const {
  return principal_log(z(plus, minus), impl_->z_floor);
}

std::complex<double> Contour::mixed_derivative(int k_minus, int k_plus, double eps) const {
  const int n = impl_->grid.n_slices();
  if (k_minus < 0 || k_minus > n || k_plus < 0 || k_plus > n) throw ValidationError("slice index outside the grid");
  if (!(eps > 0.0)) throw ValidationError("kick strength must be positive");
  const Vector& bare = impl_->forward.back();
  const Vector plus_p = impl_->single_kick_state(k_plus, eps);
  const Vector plus_m = impl_->single_kick_state(k_plus, -eps);
  const Vector minus_p = impl_->single_kick_state(k_minus, eps);
  const Vector minus_m = impl_->single_kick_state(k_minus, -eps);
  const double floor = impl_->z_floor;
  // Continuity: (0,0) → (0, ±ε) → (±ε, ±ε).
  const auto ref_p = unwrap(principal_log(bare.dot(plus_p), floor), {0.0, 0.0});
  const auto ref_m = unwrap(principal_log(bare.dot(plus_m), floor), {0.0, 0.0});
  const auto pp = unwrap(principal_log(minus_p.dot(plus_p), floor), ref_p);
  const auto mp = unwrap(principal_log(minus_m.dot(plus_p), floor), ref_p);
  const auto pm = unwrap(principal_log(minus_p.dot(plus_m), floor), ref_m);
  const auto mm = unwrap(principal_log(minus_m.dot(plus_m), floor), ref_m);
  return (pp - pm - mp + mm) / (4.0 * eps * eps);
}

std::complex<double> Contour::connected_wightman(int k_a, int k_b) const {
  const auto& fa = impl_->forward.at(static_cast<std::size_t>(k_a));
  const auto& fb = impl_->forward.at(static_cast<std::size_t>(k_b));
  const Vector inner = impl_->evolve(impl_->observable(k_b) * fb, k_b, k_a);
  const Complex product = fa.dot(impl_->observable(k_a) * inner);
  const double mean_a = fa.dot(impl_->observable(k_a) * fa).real();
  const double mean_b = fb.dot(impl_->observable(k_b) * fb).real();
  return product - mean_a * mean_b;
}

std::complex<double> ctp_log_z(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                               const TimeGrid& grid, const Matrix& o, const SourceProfile& plus,
                               const SourceProfile& minus, const Options& options) {
  return Contour(family, state0, lambda, grid, o, options).log_z(plus, minus);
}

std::complex<double> ctp_mixed_derivative(const HamiltonianFamily& family, const QuantumState& state0,
                                          const Params& lambda, const TimeGrid& grid, const Matrix& o, int k_minus,
                                          int k_plus, double eps, const Options& options) {
  if (eps < 1e-5 || eps > 1e-2) throw ValidationError("kick strength must lie in [1e-5, 1e-2]");
  return Contour(family, state0, lambda, grid, o, options).mixed_derivative(k_minus, k_plus, eps);
}

QfiEstimate qfi_from_lnz(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                         const TimeGrid& grid, const Matrix& o, const Options& options) {
  const auto start = Clock::now();
  if (grid.n_slices() > options.max_slices) {
    throw ValidationError("qfi_from_lnz supports at most " + std::to_string(options.max_slices) + " slices");
  }
  const Contour contour(family, state0, lambda, grid, o, options);
  const int nodes = grid.n_nodes();
  const double hbar = family.hbar();
  const Vector& bare = contour.final_state();

  // Single-kick branch states for every node and strength; plus and minus
  // branch insertions coincide as operators, only their role in Z differs.
  struct Stencil {
    double eps;
    std::vector<Vector> up, down;
    std::vector<std::complex<double>> ref_up, ref_down;
  };
  auto make_stencil = [&](double eps) {
    Stencil s{eps, {}, {}, {}, {}};
    for (int k = 0; k < nodes; ++k) {
      s.up.push_back(contour.single_kick_state(k, eps));
      s.down.push_back(contour.single_kick_state(k, -eps));
      s.ref_up.push_back(unwrap(principal_log(bare.dot(s.up.back()), options.z_floor), {0.0, 0.0}));
      s.ref_down.push_back(unwrap(principal_log(bare.dot(s.down.back()), options.z_floor), {0.0, 0.0}));
    }
    return s;
  };
  auto mixed = [&](const Stencil& s, int a, int b) {
    const double floor = options.z_floor;
    const auto pp = unwrap(principal_log(s.up[a].dot(s.up[b]), floor), s.ref_up[b]);
    const auto mp = unwrap(principal_log(s.down[a].dot(s.up[b]), floor), s.ref_up[b]);
    const auto pm = unwrap(principal_log(s.up[a].dot(s.down[b]), floor), s.ref_down[b]);
    const auto mm = unwrap(principal_log(s.down[a].dot(s.down[b]), floor), s.ref_down[b]);
    return ((pp - pm - mp + mm) / (4.0 * s.eps * s.eps)).real();
  };
  auto disagreement = [&](const Stencil& coarse, const Stencil& fine) {
    double worst = 0.0;
    for (int a = 0; a < nodes; ++a) {
      for (int b = 0; b < nodes; ++b) {
        const double dc = mixed(coarse, a, b);
        const double df = mixed(fine, a, b);
        worst = std::max(worst, std::abs(dc - df) / std::max(1.0, std::abs(df)));
      }
    }
    return worst;
  };

  double eps = options.kick_strength * hbar;
  Stencil coarse = make_stencil(eps);
  Stencil fine = make_stencil(eps / 2.0);
  double worst = disagreement(coarse, fine);
  std::vector<std::string> notes;
  for (int adj = 0; adj < options.max_kick_adjustments && worst > options.kick_agreement; ++adj) {
    // Try a smaller stencil first; fall back to a larger one if cancellation dominates.
    Stencil c2 = make_stencil(eps / 2.0);
    Stencil f2 = make_stencil(eps / 4.0);
    const double w2 = disagreement(c2, f2);
    if (w2 < worst) {
      eps /= 2.0;
      coarse = std::move(c2);
      fine = std::move(f2);
      worst = w2;
      continue;
    }
    Stencil c3 = make_stencil(eps * 2.0);
    Stencil f3 = make_stencil(eps);
    const double w3 = disagreement(c3, f3);
    if (w3 < worst) {
      eps *= 2.0;
      coarse = std::move(c3);
      fine = std::move(f3);
      worst = w3;
      continue;
    }
    break;
  }

  // Richardson-combined mixed derivatives, one row per minus-branch node.
  RealMatrix d(nodes, nodes);
  parallel_for(static_cast<std::size_t>(nodes), options.threads, [&](std::size_t a) {
    for (int b = 0; b < nodes; ++b) {
      const int ia = static_cast<int>(a);
      d(ia, b) = (4.0 * mixed(fine, ia, b) - mixed(coarse, ia, b)) / 3.0;
    }
  });

  auto double_sum = [&](int stride) {
    const auto w = trapezoid_weights(grid.n_slices(), grid.spacing(), stride);
    std::vector<double> rows(static_cast<std::size_t>(nodes), 0.0);
    for (int a = 0; a < nodes; ++a) {
      if (w[a] == 0.0) continue;
      std::vector<double> terms(static_cast<std::size_t>(nodes), 0.0);
      for (int b = 0; b < nodes; ++b) terms[b] = w[a] * w[b] * d(a, b);
      rows[a] = pairwise_sum(terms, 0, terms.size());
    }
    return 4.0 * pairwise_sum(rows, 0, rows.size());
  };

  QfiEstimate est;
  est.method = QfiMethod::ctp_lnz;
  est.metadata.model = family.id();
  est.metadata.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  est.metadata.t = grid.t();
  est.metadata.discretization = family.discretization();
  est.metadata.tolerances["n_slices"] = grid.n_slices();
  est.metadata.tolerances["kick_strength"] = eps;
  est.metadata.tolerances["kick_disagreement"] = worst;
  if (worst > options.kick_agreement) {
    est.metadata.warnings.push_back("kick-strength Richardson pair disagrees by " + std::to_string(worst));
  }
  const double full = double_sum(1);
  if (grid.n_slices() % 2 == 0) est.metadata.discretization_error = std::abs(full - double_sum(2));
  est.value = clamp_qfi(full, est.metadata);
  est.metadata.runtime_ms = elapsed_ms(start);
  return est;
}

QfiEstimate qfi_from_lnz(const HamiltonianFamily& family, const QuantumState& state0, const Params& lambda,
                         std::size_t parameter, const TimeGrid& grid, const Options& options) {
  if (family.time_dependent()) {
    throw UnsupportedError("qfi_from_lnz needs a time-independent deformation operator");
  }
  auto est = qfi_from_lnz(family, state0, lambda, grid, Matrix(-family.deformation_at(lambda, parameter)), options);
  est.metadata.parameter = parameter;
  return est;
}

}  // namespace qfi::correlator
