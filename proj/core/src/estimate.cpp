#include "qfi/estimate.hpp"

#include <string>

#include "qfi/errors.hpp"
#include "qfi/types.hpp"

namespace qfi {

std::string_view to_string(QfiMethod method) {
  switch (method) {
    case QfiMethod::overlap_fd: return "overlap_fd";
    case QfiMethod::generator_variance: return "generator_variance";
    case QfiMethod::correlator_integral: return "correlator_integral";
    case QfiMethod::ctp_lnz: return "ctp_lnz";
    case QfiMethod::semiclassical_mc: return "semiclassical_mc";
  }
  return "unknown";
}

QfiMethod method_from_string(std::string_view name) {
  for (auto m : {QfiMethod::overlap_fd, QfiMethod::generator_variance, QfiMethod::correlator_integral,
                 QfiMethod::ctp_lnz, QfiMethod::semiclassical_mc}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown route '" + std::string(name) + "'");
}

double clamp_qfi(double raw, EstimateMetadata& metadata) {
  if (raw >= 0.0) return raw;
  if (raw >= -kClampTolerance) {
    metadata.clamped = true;
    metadata.warnings.push_back("negative round-off value " + std::to_string(raw) + " clamped to 0");
    return 0.0;
  }
  throw InternalConsistencyError("QFI evaluated to " + std::to_string(raw) + ", below the round-off floor");
}

QuantumState::QuantumState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ValidationError("quantum state has zero dimension");
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw ValidationError("quantum state is not normalized (norm " + std::to_string(norm) + ")");
  }
}

QuantumState QuantumState::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("cannot normalize a zero or non-finite vector");
  amplitudes /= norm;
  return QuantumState(std::move(amplitudes));
}

Complex QuantumState::expectation(const Matrix& op) const {
  if (op.rows() != dim() || op.cols() != dim()) throw ValidationError("operator dimension mismatch");
  return amplitudes_.dot(op * amplitudes_);
}

}  // namespace qfi
