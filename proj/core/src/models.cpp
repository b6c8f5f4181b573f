#include "qfi/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "qfi/errors.hpp"
#include "qfi/linalg.hpp"
#include "qfi/wigner.hpp"

namespace qfi::models {
namespace {

constexpr Eigen::Index kDimCap = 4096;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

template <typename T>
const T& require_discretization(const ModelSpec& spec, const char* what) {
  const T* d = std::get_if<T>(&spec.discretization);
  if (!d) throw ValidationError(std::string(to_string(spec.id)) + " requires a " + what + " discretization");
  return *d;
}

Matrix to_complex(const RealMatrix& m) { return m.cast<Complex>(); }

// Local truncated oscillator operators. Powers are formed in an enlarged
// basis and then truncated so the top retained level is exact.
struct LocalOperators {
  RealMatrix phi, phi2, phi4, pi2;
};

LocalOperators local_operators(int n_max, double omega, double hbar) {
  const int keep = n_max + 1;
  const int big = keep + 4;
  RealMatrix a = RealMatrix::Zero(big, big);
  for (int k = 1; k < big; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const RealMatrix x = std::sqrt(hbar / (2.0 * omega)) * (a + a.transpose());
  const RealMatrix d = a.transpose() - a;  // π = i √(ħω/2) (a† − a)
  const RealMatrix p2 = -(hbar * omega / 2.0) * (d * d);
  const RealMatrix x2 = x * x;
  LocalOperators ops;
  ops.phi = x.topLeftCorner(keep, keep);
  ops.phi2 = x2.topLeftCorner(keep, keep);
  ops.phi4 = (x2 * x2).topLeftCorner(keep, keep);
  ops.pi2 = p2.topLeftCorner(keep, keep);
  return ops;
}

// op acting on `site` of an N-site register with local dimension d.
RealMatrix embed(const RealMatrix& op, int site, int sites, int d) {
  const Eigen::Index left = static_cast<Eigen::Index>(std::pow(d, site));
  const Eigen::Index right = static_cast<Eigen::Index>(std::pow(d, sites - site - 1));
  const Eigen::Index dim = left * d * right;
  RealMatrix out = RealMatrix::Zero(dim, dim);
  for (Eigen::Index l = 0; l < left; ++l) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const double v = op(a, b);
        if (v == 0.0) continue;
        for (Eigen::Index r = 0; r < right; ++r) {
          out((l * d + a) * right + r, (l * d + b) * right + r) = v;
        }
      }
    }
  }
  return out;
}

Eigen::Index lattice_dim(const LatticeDiscretization& lat) {
  double dim = std::pow(static_cast<double>(lat.n_max + 1), lat.sites);
  return dim > static_cast<double>(kDimCap) * 16 ? kDimCap * 16 : static_cast<Eigen::Index>(dim);
}

double lattice_basis_frequency(const ModelSpec& spec) {
  const auto& lat = std::get<LatticeDiscretization>(spec.discretization);
  const RealMatrix k = lattice_coupling(lat.sites, spec.reference[0]);
  return std::sqrt(k(0, 0));
}

std::string grid_label(const GridDiscretization& g) {
  return "grid(L=" + std::to_string(g.half_width) + ",n=" + std::to_string(g.points) + ")";
}

// ψ(x) ∝ exp(−(x−q̄)²/(4σ_xx) + i σ_xp (x−q̄)²/(2ħσ_xx) + i p̄ (x−q̄)/ħ) on the grid.
QuantumState grid_gaussian(const GridDiscretization& grid, double q, double p, double sxx, double sxp, double hbar) {
  const RealVector x = grid_positions(grid);
  Vector psi(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double u = x[j] - q;
    psi[j] = std::exp(Complex(-u * u / (4.0 * sxx), sxp * u * u / (2.0 * hbar * sxx) + p * u / hbar));
  }
  return QuantumState::normalized(std::move(psi));
}

QuantumState lowest_eigenvector(const HamiltonianFamily& family, const Params& lambda) {
  const Spectrum spectrum(family.hamiltonian_at(lambda));
  return QuantumState::normalized(spectrum.vectors().col(0));
}

void check_grid_extent(const GridDiscretization& grid, const QuantumState& state, double amplitude) {
  const RealVector x = grid_positions(grid);
  const RealVector prob = state.amplitudes().cwiseAbs2();
  const double mean = prob.dot(x);
  const double var = prob.dot(x.cwiseProduct(x)) - mean * mean;
  const double spread = std::sqrt(std::max(var, 0.0));
  if (!(grid.half_width > 4.0 * spread) || !(grid.half_width > amplitude + 4.0 * spread)) {
    throw ValidationError("grid half-width " + std::to_string(grid.half_width) +
                          " does not cover the initial state (spread " + std::to_string(spread) + ", amplitude " +
                          std::to_string(amplitude) + ")");
  }
}

}  // namespace

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::qubit_phase: return "qubit_phase";
    case ModelId::qubit_mixed_axis: return "qubit_mixed_axis";
    case ModelId::harmonic: return "harmonic";
    case ModelId::quartic: return "quartic";
    case ModelId::driven_oscillator: return "driven_oscillator";
    case ModelId::lattice_scalar: return "lattice_scalar";
  }
  return "unknown";
}

ModelId model_from_string(std::string_view name) {
  for (auto id : {ModelId::qubit_phase, ModelId::qubit_mixed_axis, ModelId::harmonic, ModelId::quartic,
                  ModelId::driven_oscillator, ModelId::lattice_scalar}) {
    if (to_string(id) == name) return id;
  }
  throw ValidationError("unknown model id '" + std::string(name) + "'");
}

std::vector<std::string> parameter_labels(ModelId id) {
  switch (id) {
    case ModelId::qubit_phase:
    case ModelId::qubit_mixed_axis: return {"lambda"};
    case ModelId::harmonic: return {"omega", "force"};
    case ModelId::quartic: return {"g"};
    case ModelId::driven_oscillator: return {"amplitude", "drive_frequency"};
    case ModelId::lattice_scalar: return {"m2", "g"};
  }
  return {};
}

std::string describe(ModelId id) {
  switch (id) {
    case ModelId::qubit_phase: return "H = lambda sigma_z / 2";
    case ModelId::qubit_mixed_axis: return "H = omega sigma_z + lambda sigma_x";
    case ModelId::harmonic: return "H = p^2/2m + m omega^2 x^2/2 - force x (Fourier grid)";
    case ModelId::quartic: return "H = p^2/2m + m omega0^2 x^2/2 + g x^4 (Fourier grid)";
    case ModelId::driven_oscillator:
      return "H = p^2/2m + m omega0^2 x^2/2 - amplitude sin(drive_frequency t) x (Fock basis)";
    case ModelId::lattice_scalar:
      return "H = sum pi^2/2 + (phi_{i+1}-phi_i)^2/2 + m2 phi^2/2 + g phi^4 (periodic, per-site oscillator basis)";
  }
  return {};
}

bool has_classical_counterpart(ModelId id) { return id != ModelId::qubit_phase && id != ModelId::qubit_mixed_axis; }

ModelSpec default_spec(ModelId id) {
  ModelSpec spec;
  spec.id = id;
  switch (id) {
    case ModelId::qubit_phase:
      spec.reference = Params::Constant(1, 1.0);
      spec.discretization = NoDiscretization{};
      break;
    case ModelId::qubit_mixed_axis:
      spec.reference = Params::Constant(1, 0.3);
      spec.discretization = NoDiscretization{};
      break;
    case ModelId::harmonic:
      spec.reference = Params(2);
      spec.reference << 1.0, 0.0;
      spec.discretization = GridDiscretization{};
      break;
    case ModelId::quartic:
      spec.reference = Params::Constant(1, 0.1);
      spec.discretization = GridDiscretization{};
      break;
    case ModelId::driven_oscillator:
      spec.reference = Params(2);
      spec.reference << 0.5, 1.3;
      spec.discretization = FockDiscretization{};
      break;
    case ModelId::lattice_scalar:
      spec.reference = Params(2);
      spec.reference << 1.0, 0.0;
      spec.discretization = LatticeDiscretization{};
      break;
  }
  return spec;
}

double characteristic_time(const ModelSpec& spec) {
  double omega = 1.0;
  switch (spec.id) {
    case ModelId::harmonic: omega = spec.reference[0]; break;
    case ModelId::quartic:
    case ModelId::driven_oscillator:
    case ModelId::qubit_mixed_axis: omega = spec.omega; break;
    case ModelId::qubit_phase: omega = std::abs(spec.reference[0]); break;
    case ModelId::lattice_scalar: {
      const auto& lat = std::get<LatticeDiscretization>(spec.discretization);
      const Eigen::SelfAdjointEigenSolver<RealMatrix> es(lattice_coupling(lat.sites, spec.reference[0]));
      omega = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
      break;
    }
  }
  if (!(omega > 0.0)) omega = 1.0;
  return 2.0 * std::numbers::pi / omega;
}

void validate(const ModelSpec& spec) {
  const std::string name(to_string(spec.id));
  if (!(spec.mass > 0.0)) throw ValidationError(name + ": mass must be positive");
  if (!(spec.hbar > 0.0)) throw ValidationError(name + ": hbar must be positive");
  if (static_cast<std::size_t>(spec.reference.size()) != parameter_labels(spec.id).size()) {
    throw ValidationError(name + ": expected " + std::to_string(parameter_labels(spec.id).size()) +
                          " reference parameters");
  }
  if (!spec.reference.allFinite()) throw ValidationError(name + ": reference parameters must be finite");
  switch (spec.id) {
    case ModelId::qubit_phase:
    case ModelId::qubit_mixed_axis:
      if (!std::holds_alternative<NoDiscretization>(spec.discretization)) {
        throw ValidationError(name + ": qubit models take no discretization");
      }
      break;
    case ModelId::harmonic:
    case ModelId::quartic: {
      const auto& g = require_discretization<GridDiscretization>(spec, "grid");
      if (!is_power_of_two(g.points) || g.points < 64) {
        throw ValidationError(name + ": grid points must be a power of two >= 64");
      }
      if (g.points > kDimCap) throw ResourceError(name + ": grid dimension above the cap");
      if (!(g.half_width > 0.0)) throw ValidationError(name + ": grid half-width must be positive");
      if (spec.id == ModelId::harmonic && !(spec.reference[0] > 0.0)) {
        throw ValidationError(name + ": reference omega must be positive");
      }
      if (spec.id == ModelId::quartic && !(spec.omega > 0.0)) throw ValidationError(name + ": omega must be positive");
      break;
    }
    case ModelId::driven_oscillator: {
      const auto& f = require_discretization<FockDiscretization>(spec, "Fock");
      if (f.n_max < 1) throw ValidationError(name + ": Fock truncation must be at least 1");
      if (f.n_max + 1 > kDimCap) throw ResourceError(name + ": Fock dimension above the cap");
      if (!(spec.omega > 0.0)) throw ValidationError(name + ": omega must be positive");
      break;
    }
    case ModelId::lattice_scalar: {
      const auto& lat = require_discretization<LatticeDiscretization>(spec, "lattice");
      if (lat.sites < 1) throw ValidationError(name + ": at least one site required");
      if (lat.n_max < 1) throw ValidationError(name + ": local truncation must be at least 1");
      if (lattice_dim(lat) > kDimCap) {
        throw ResourceError(name + ": total dimension (n_max+1)^sites exceeds the cap of " + std::to_string(kDimCap));
      }
      const RealMatrix k = lattice_coupling(lat.sites, spec.reference[0]);
      if (!(k(0, 0) > 0.0)) throw ValidationError(name + ": reference m2 gives no positive local frequency");
      break;
    }
  }
}

RealVector grid_positions(const GridDiscretization& grid) {
  const double dx = 2.0 * grid.half_width / grid.points;
  RealVector x(grid.points);
  for (int j = 0; j < grid.points; ++j) x[j] = -grid.half_width + j * dx;
  return x;
}

RealMatrix fourier_kinetic(const GridDiscretization& grid, double mass, double hbar) {
  const int n = grid.points;
  const double dx = 2.0 * grid.half_width / n;
  const double dk = 2.0 * std::numbers::pi / (n * dx);
  const double pref = hbar * hbar / (2.0 * mass) / n;
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  for (int d = 0; d < n; ++d) {
    double sum = 0.0;
    for (int m = 1; m < n / 2; ++m) {
      const double k = m * dk;
      sum += 2.0 * k * k * std::cos(2.0 * std::numbers::pi * m * d / n);
    }
    const double k_nyquist = (n / 2) * dk;
    sum += k_nyquist * k_nyquist * ((d % 2 == 0) ? 1.0 : -1.0);
    c[d] = pref * sum;
  }
  RealMatrix t(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) t(j, l) = c[static_cast<std::size_t>(((j - l) % n + n) % n)];
  }
  return t;
}

RealMatrix lattice_coupling(int sites, double m2) {
  RealMatrix k = m2 * RealMatrix::Identity(sites, sites);
  if (sites < 2) return k;
  for (int i = 0; i < sites; ++i) {
    const int j = (i + 1) % sites;
    k(i, i) += 1.0;
    k(j, j) += 1.0;
    k(i, j) -= 1.0;
    k(j, i) -= 1.0;
  }
  return k;
}

HamiltonianFamily build_quantum(const ModelSpec& spec) {
  validate(spec);
  HamiltonianFamily::Definition def;
  def.id = std::string(to_string(spec.id));
  def.hbar = spec.hbar;
  def.labels = parameter_labels(spec.id);
  const double m = spec.mass;

  switch (spec.id) {
    case ModelId::qubit_phase: {
      const Matrix sz = (Matrix(2, 2) << 1, 0, 0, -1).finished();
      def.dim = 2;
      def.discretization = "qubit";
      def.hamiltonian = [sz](const Params& l, double) -> Matrix { return 0.5 * l[0] * sz; };
      def.deformations = [sz](const Params&, double) { return std::vector<Matrix>{0.5 * sz}; };
      break;
    }
    case ModelId::qubit_mixed_axis: {
      const Matrix sz = (Matrix(2, 2) << 1, 0, 0, -1).finished();
      const Matrix sx = (Matrix(2, 2) << 0, 1, 1, 0).finished();
      const double w = spec.omega;
      def.dim = 2;
      def.discretization = "qubit";
      def.hamiltonian = [sz, sx, w](const Params& l, double) -> Matrix { return w * sz + l[0] * sx; };
      def.deformations = [sx](const Params&, double) { return std::vector<Matrix>{sx}; };
      break;
    }
    case ModelId::harmonic: {
      const auto& g = std::get<GridDiscretization>(spec.discretization);
      const RealVector x = grid_positions(g);
      const Matrix kinetic = to_complex(fourier_kinetic(g, m, spec.hbar));
      def.dim = g.points;
      def.discretization = grid_label(g);
      def.grid_positions = x;
      def.hamiltonian = [kinetic, x, m](const Params& l, double) -> Matrix {
        const RealVector v = 0.5 * m * l[0] * l[0] * x.cwiseAbs2() - l[1] * x;
        Matrix h = kinetic;
        h.diagonal() += v.cast<Complex>();
        return h;
      };
      def.deformations = [x, m](const Params& l, double) {
        const RealVector d_omega = m * l[0] * x.cwiseAbs2();
        const RealVector d_force = -x;
        return std::vector<Matrix>{to_complex(d_omega.asDiagonal().toDenseMatrix()),
                                   to_complex(d_force.asDiagonal().toDenseMatrix())};
      };
      break;
    }
    case ModelId::quartic: {
      const auto& g = std::get<GridDiscretization>(spec.discretization);
      const RealVector x = grid_positions(g);
      const Matrix kinetic = to_complex(fourier_kinetic(g, m, spec.hbar));
      const double w = spec.omega;
      def.dim = g.points;
      def.discretization = grid_label(g);
      def.grid_positions = x;
      def.hamiltonian = [kinetic, x, m, w](const Params& l, double) -> Matrix {
        const RealVector x2 = x.cwiseAbs2();
        const RealVector v = 0.5 * m * w * w * x2 + l[0] * x2.cwiseAbs2();
        Matrix h = kinetic;
        h.diagonal() += v.cast<Complex>();
        return h;
      };
      def.deformations = [x](const Params&, double) {
        const RealVector d_g = x.cwiseAbs2().cwiseAbs2();
        return std::vector<Matrix>{to_complex(d_g.asDiagonal().toDenseMatrix())};
      };
      break;
    }
    case ModelId::driven_oscillator: {
      const auto& f = std::get<FockDiscretization>(spec.discretization);
      const int d = f.n_max + 1;
      const double w = spec.omega;
      RealMatrix a = RealMatrix::Zero(d, d);
      for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
      const Matrix x = to_complex(std::sqrt(spec.hbar / (2.0 * m * w)) * (a + a.transpose()));
      Matrix h0 = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) h0(k, k) = spec.hbar * w * (k + 0.5);
      def.dim = d;
      def.discretization = "fock(n_max=" + std::to_string(f.n_max) + ")";
      def.time_dependent = true;
      def.hamiltonian = [h0, x](const Params& l, double t) -> Matrix { return h0 - l[0] * std::sin(l[1] * t) * x; };
      def.deformations = [x](const Params& l, double t) {
        return std::vector<Matrix>{-std::sin(l[1] * t) * x, -l[0] * t * std::cos(l[1] * t) * x};
      };
      break;
    }
    case ModelId::lattice_scalar: {
      const auto& lat = std::get<LatticeDiscretization>(spec.discretization);
      const double wb = lattice_basis_frequency(spec);
      const auto ops = local_operators(lat.n_max, wb, spec.hbar);
      const int d = lat.n_max + 1;
      const RealMatrix lap = lattice_coupling(lat.sites, 0.0);
      std::vector<RealMatrix> phi, phi2;
      const Eigen::Index dim = lattice_dim(lat);
      RealMatrix fixed = RealMatrix::Zero(dim, dim);
      RealMatrix d_m2 = RealMatrix::Zero(dim, dim);
      RealMatrix d_g = RealMatrix::Zero(dim, dim);
      for (int i = 0; i < lat.sites; ++i) {
        phi.push_back(embed(ops.phi, i, lat.sites, d));
        phi2.push_back(embed(ops.phi2, i, lat.sites, d));
        fixed += 0.5 * embed(ops.pi2, i, lat.sites, d);
        d_m2 += 0.5 * phi2.back();
        d_g += embed(ops.phi4, i, lat.sites, d);
      }
      for (int i = 0; i < lat.sites; ++i) {
        for (int j = 0; j < lat.sites; ++j) {
          if (lap(i, j) == 0.0) continue;
          fixed += 0.5 * lap(i, j) * (i == j ? phi2[i] : RealMatrix(phi[i] * phi[j]));
        }
      }
      const Matrix hf = to_complex(fixed);
      const Matrix dm = to_complex(d_m2);
      const Matrix dg = to_complex(d_g);
      def.dim = dim;
      def.discretization = "lattice(N=" + std::to_string(lat.sites) + ",n_max=" + std::to_string(lat.n_max) + ")";
      def.hamiltonian = [hf, dm, dg](const Params& l, double) -> Matrix { return hf + l[0] * dm + l[1] * dg; };
      def.deformations = [dm, dg](const Params&, double) { return std::vector<Matrix>{dm, dg}; };
      break;
    }
  }
  return HamiltonianFamily(std::move(def));
}

classical::ClassicalModel build_classical(const ModelSpec& spec) {
  validate(spec);
  if (!has_classical_counterpart(spec.id)) {
    throw UnsupportedError("model " + std::string(to_string(spec.id)) + " has no classical counterpart");
  }
  using classical::ConstSpan;
  using classical::MutSpan;
  classical::ClassicalModel model;
  model.id = std::string(to_string(spec.id));
  model.mass = spec.mass;
  model.hbar = spec.hbar;
  model.labels = parameter_labels(spec.id);
  model.characteristic_time = characteristic_time(spec);
  const double m = spec.mass;
  const double w0 = spec.omega;

  switch (spec.id) {
    case ModelId::harmonic:
      model.potential = [m](ConstSpan q, const Params& l, double) {
        return 0.5 * m * l[0] * l[0] * q[0] * q[0] - l[1] * q[0];
      };
      model.force = [m](ConstSpan q, const Params& l, double, MutSpan f) { f[0] = -m * l[0] * l[0] * q[0] + l[1]; };
      model.dlagrangian = [m](ConstSpan q, ConstSpan, const Params& l, double, MutSpan out) {
        out[0] = -m * l[0] * q[0] * q[0];
        out[1] = q[0];
      };
      break;
    case ModelId::quartic:
      model.potential = [m, w0](ConstSpan q, const Params& l, double) {
        const double x2 = q[0] * q[0];
        return 0.5 * m * w0 * w0 * x2 + l[0] * x2 * x2;
      };
      model.force = [m, w0](ConstSpan q, const Params& l, double, MutSpan f) {
        f[0] = -m * w0 * w0 * q[0] - 4.0 * l[0] * q[0] * q[0] * q[0];
      };
      model.dlagrangian = [](ConstSpan q, ConstSpan, const Params&, double, MutSpan out) {
        const double x2 = q[0] * q[0];
        out[0] = -x2 * x2;
      };
      break;
    case ModelId::driven_oscillator:
      model.potential = [m, w0](ConstSpan q, const Params& l, double t) {
        return 0.5 * m * w0 * w0 * q[0] * q[0] - l[0] * std::sin(l[1] * t) * q[0];
      };
      model.force = [m, w0](ConstSpan q, const Params& l, double t, MutSpan f) {
        f[0] = -m * w0 * w0 * q[0] + l[0] * std::sin(l[1] * t);
      };
      model.dlagrangian = [](ConstSpan q, ConstSpan, const Params& l, double t, MutSpan out) {
        out[0] = std::sin(l[1] * t) * q[0];
        out[1] = l[0] * t * std::cos(l[1] * t) * q[0];
      };
      break;
    case ModelId::lattice_scalar: {
      const int n = std::get<LatticeDiscretization>(spec.discretization).sites;
      const RealMatrix lap = lattice_coupling(n, 0.0);
      model.dof = n;
      model.mass = 1.0;
      model.potential = [lap, n](ConstSpan q, const Params& l, double) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
          double row = 0.0;
          for (int j = 0; j < n; ++j) row += lap(i, j) * q[j];
          const double q2 = q[i] * q[i];
          v += 0.5 * q[i] * row + 0.5 * l[0] * q2 + l[1] * q2 * q2;
        }
        return v;
      };
      model.force = [lap, n](ConstSpan q, const Params& l, double, MutSpan f) {
        for (int i = 0; i < n; ++i) {
          double row = 0.0;
          for (int j = 0; j < n; ++j) row += lap(i, j) * q[j];
          f[i] = -row - l[0] * q[i] - 4.0 * l[1] * q[i] * q[i] * q[i];
        }
      };
      model.dlagrangian = [n](ConstSpan q, ConstSpan, const Params&, double, MutSpan out) {
        double s2 = 0.0;
        double s4 = 0.0;
        for (int i = 0; i < n; ++i) {
          const double q2 = q[i] * q[i];
          s2 += q2;
          s4 += q2 * q2;
        }
        out[0] = -0.5 * s2;
        out[1] = -s4;
      };
      break;
    }
    case ModelId::qubit_phase:
    case ModelId::qubit_mixed_axis: break;
  }
  return model;
}

std::string to_string(const StateKind& kind) {
  switch (kind.kind) {
    case StateKind::Kind::ground: return "ground";
    case StateKind::Kind::plus: return "plus";
    case StateKind::Kind::coherent:
      return "coherent(" + std::to_string(kind.alpha.real()) + "," + std::to_string(kind.alpha.imag()) + ")";
    case StateKind::Kind::gaussian: return "gaussian";
  }
  return "unknown";
}

InitialState initial_state(const ModelSpec& spec, const StateKind& kind) {
  validate(spec);
  const double hbar = spec.hbar;
  const double m = spec.mass;
  using K = StateKind::Kind;

  switch (spec.id) {
    case ModelId::qubit_phase:
    case ModelId::qubit_mixed_axis: {
      if (kind.kind == K::plus) {
        Vector v(2);
        v << 1.0, 1.0;
        return {QuantumState::normalized(v), std::nullopt, {}};
      }
      if (kind.kind == K::ground) return {lowest_eigenvector(build_quantum(spec), spec.reference), std::nullopt, {}};
      throw ValidationError("qubit models support the ground and plus states only");
    }
    case ModelId::harmonic:
    case ModelId::quartic: {
      const auto& g = std::get<GridDiscretization>(spec.discretization);
      const double w = spec.id == ModelId::harmonic ? spec.reference[0] : spec.omega;
      if (kind.kind == K::plus) throw ValidationError("the plus state is defined for qubit models only");
      if (spec.id == ModelId::quartic && kind.kind == K::ground) {
        const auto family = build_quantum(spec);
        QuantumState state = lowest_eigenvector(family, spec.reference);
        check_grid_extent(g, state, 0.0);
        InitialState out{std::move(state), wigner::gaussian_for(spec, kind), {}};
        out.warnings.push_back("quartic ground state is not Gaussian; semiclassical route uses a moment-matched Gaussian");
        return out;
      }
      double q = 0.0;
      double p = 0.0;
      double sxx = hbar / (2.0 * m * w);
      double sxp = 0.0;
      if (kind.kind == K::coherent) {
        q = std::sqrt(2.0 * hbar / (m * w)) * kind.alpha.real();
        p = std::sqrt(2.0 * hbar * m * w) * kind.alpha.imag();
      } else if (kind.kind == K::gaussian) {
        wigner::validate({kind.mean, kind.cov, hbar, true});
        if (kind.mean.size() != 2) throw ValidationError("explicit Gaussian states need one degree of freedom");
        const double det = kind.cov.determinant();
        if (std::abs(det / (0.25 * hbar * hbar) - 1.0) > 1e-10) {
          throw ValidationError("explicit Gaussian covariance is not minimum-uncertainty; no pure state matches it");
        }
        q = kind.mean[0];
        p = kind.mean[1];
        sxx = kind.cov(0, 0);
        sxp = kind.cov(0, 1);
      }
      QuantumState state = grid_gaussian(g, q, p, sxx, sxp, hbar);
      check_grid_extent(g, state, std::sqrt(q * q + (p / (m * w)) * (p / (m * w))));
      return {std::move(state), wigner::gaussian_for(spec, kind), {}};
    }
    case ModelId::driven_oscillator: {
      const int d = std::get<FockDiscretization>(spec.discretization).n_max + 1;
      Vector v = Vector::Zero(d);
      if (kind.kind == K::ground) {
        v[0] = 1.0;
      } else if (kind.kind == K::coherent) {
        // c_n = e^{-|α|²/2} αⁿ/√n!, built recursively.
        Complex c = std::exp(-0.5 * std::norm(kind.alpha));
        for (int n = 0; n < d; ++n) {
          v[n] = c;
          c *= kind.alpha / std::sqrt(static_cast<double>(n + 1));
        }
        const double loss = 1.0 - v.squaredNorm();
        if (loss > 1e-10) {
          throw ValidationError("Fock truncation n_max=" + std::to_string(d - 1) + " loses " + std::to_string(loss) +
                                " of the coherent state norm");
        }
      } else {
        throw ValidationError("driven_oscillator supports ground and coherent states");
      }
      return {QuantumState::normalized(std::move(v)), wigner::gaussian_for(spec, kind), {}};
    }
    case ModelId::lattice_scalar: {
      if (kind.kind != K::ground) throw ValidationError("lattice_scalar supports the ground state only");
      InitialState out{lowest_eigenvector(build_quantum(spec), spec.reference), wigner::gaussian_for(spec, kind), {}};
      if (spec.reference[1] != 0.0) {
        out.warnings.push_back("interacting lattice ground state: Wigner Gaussian built from the quadratic part");
      }
      return out;
    }
  }
  throw ValidationError("unsupported model");
}

}  // namespace qfi::models
