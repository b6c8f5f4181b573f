#pragma once

#include <cmath>
#include <random>

#include "qfi/hamiltonian_family.hpp"
#include "qfi/types.hpp"

namespace qfi::test {

inline Matrix sigma_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
inline Matrix sigma_y() { return (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
inline Matrix sigma_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

inline QuantumState plus_state() {
  Vector v(2);
  v << 1.0, 1.0;
  return QuantumState::normalized(v);
}

/// H(λ) = h0 + Σ λ_i d_i with constant deformations.
inline HamiltonianFamily linear_family(const Matrix& h0, std::vector<Matrix> d, double hbar = 1.0) {
  HamiltonianFamily::Definition def;
  def.id = "linear";
  def.dim = h0.rows();
  def.hbar = hbar;
  for (std::size_t i = 0; i < d.size(); ++i) def.labels.push_back("l" + std::to_string(i));
  def.hamiltonian = [h0, d](const Params& l, double) {
    Matrix h = h0;
    for (std::size_t i = 0; i < d.size(); ++i) h += l[static_cast<Eigen::Index>(i)] * d[i];
    return h;
  };
  def.deformations = [d](const Params&, double) { return d; };
  return HamiltonianFamily(std::move(def));
}

inline Matrix random_hermitian(Eigen::Index n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(dist(gen), dist(gen));
  }
  return 0.5 * (a + a.adjoint());
}

inline QuantumState random_state(Eigen::Index n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(dist(gen), dist(gen));
  return QuantumState::normalized(v);
}

}  // namespace qfi::test
