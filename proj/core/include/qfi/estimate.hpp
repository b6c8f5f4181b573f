#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfi/types.hpp"

namespace qfi {

enum class QfiMethod {
  overlap_fd,
  generator_variance,
  correlator_integral,
  ctp_lnz,
  semiclassical_mc,
};

std::string_view to_string(QfiMethod method);
/// Throws ValidationError on an unknown name.
QfiMethod method_from_string(std::string_view name);

struct EstimateMetadata {
  std::string model;
  std::vector<double> lambda;
  std::size_t parameter = 0;
  double t = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_samples;
  std::optional<double> dt;
  std::string discretization;
  std::map<std::string, double> tolerances;
  double runtime_ms = 0.0;
  std::vector<std::string> warnings;
  bool clamped = false;
  std::optional<double> discretization_error;
  std::optional<double> dropped_fraction;
};

struct QfiEstimate {
  double value = 0.0;
  std::optional<double> std_error;
  QfiMethod method = QfiMethod::generator_variance;
  EstimateMetadata metadata;
};

struct QfimEstimate {
  RealMatrix value;
  std::optional<RealMatrix> std_error;
  QfiMethod method = QfiMethod::generator_variance;
  EstimateMetadata metadata;
};

/// Negative values in [-kClampTolerance, 0) are set to zero and flagged;
/// anything more negative is an InternalConsistencyError.
inline constexpr double kClampTolerance = 1e-8;

double clamp_qfi(double raw, EstimateMetadata& metadata);

}  // namespace qfi
