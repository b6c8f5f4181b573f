#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfi/classical.hpp"
#include "qfi/correlator.hpp"
#include "qfi/estimate.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/models.hpp"
#include "qfi/semiclassical.hpp"

namespace qfi {

struct CompareRequest {
  models::ModelSpec model;
  models::StateKind state;
  Params lambda;
  std::size_t parameter = 0;
  double t = 1.0;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
  std::optional<double> dt;
  exact::Options exact_options;
  sc::Options sc_options;
};

struct RouteOutcome {
  QfiMethod method;
  std::optional<QfiEstimate> estimate;
  /// Set when the route was unsupported or failed.
  std::string error;
};

struct Discrepancy {
  QfiMethod a;
  QfiMethod b;
  /// |F_a − F_b| / max(1, |F_b|).
  double relative = 0.0;
  /// |F_a − F_b| / stderr when either side is stochastic.
  std::optional<double> in_stderr;
};

struct CompareReport {
  std::string model;
  std::string state;
  std::vector<double> lambda;
  std::size_t parameter = 0;
  double t = 0.0;
  std::vector<RouteOutcome> routes;
  std::vector<Discrepancy> discrepancies;

  const RouteOutcome* find(QfiMethod method) const;
};

/// Runs overlap_fd, generator_variance, correlator_integral and, when the
/// model has a classical counterpart and a Gaussian initial state,
/// semiclassical_mc; records every pairwise discrepancy.
CompareReport compare_routes(const CompareRequest& request);

}  // namespace qfi
