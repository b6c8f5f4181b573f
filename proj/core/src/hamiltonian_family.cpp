#include "qfi/hamiltonian_family.hpp"

#include <string>

#include "qfi/errors.hpp"
#include "qfi/linalg.hpp"

namespace qfi {

HamiltonianFamily::HamiltonianFamily(Definition def) : def_(std::move(def)) {
  if (def_.dim <= 0) throw ValidationError("family dimension must be positive");
  if (!(def_.hbar > 0.0)) throw ValidationError("hbar must be positive");
  if (!def_.hamiltonian || !def_.deformations) throw ValidationError("family needs H and ∂H callbacks");
  if (def_.labels.empty()) throw ValidationError("family needs at least one parameter label");
}

void HamiltonianFamily::check_params(const Params& lambda) const {
  if (static_cast<std::size_t>(lambda.size()) != def_.labels.size()) {
    throw ValidationError("family '" + def_.id + "' expects " + std::to_string(def_.labels.size()) +
                          " parameters, got " + std::to_string(lambda.size()));
  }
}

Matrix HamiltonianFamily::hamiltonian_at(const Params& lambda, double t) const {
  check_params(lambda);
  Matrix h = def_.hamiltonian(lambda, t);
  if (h.rows() != def_.dim || h.cols() != def_.dim) throw ValidationError("H has wrong dimension");
  require_hermitian(h, kHermitianTolerance, "H(" + def_.id + ")");
  return h;
}

std::vector<Matrix> HamiltonianFamily::deformations_at(const Params& lambda, double t) const {
  check_params(lambda);
  auto d = def_.deformations(lambda, t);
  if (d.size() != def_.labels.size()) throw ValidationError("deformation count does not match labels");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].rows() != def_.dim || d[i].cols() != def_.dim) throw ValidationError("∂H has wrong dimension");
    require_hermitian(d[i], kHermitianTolerance, "∂H/∂" + def_.labels[i]);
  }
  return d;
}

Matrix HamiltonianFamily::deformation_at(const Params& lambda, std::size_t index, double t) const {
  if (index >= def_.labels.size()) throw ValidationError("parameter index out of range");
  return deformations_at(lambda, t)[index];
}

std::size_t HamiltonianFamily::parameter_index(const std::string& label) const {
  for (std::size_t i = 0; i < def_.labels.size(); ++i) {
    if (def_.labels[i] == label) return i;
  }
  throw ValidationError("family '" + def_.id + "' has no parameter '" + label + "'");
}

}  // namespace qfi
