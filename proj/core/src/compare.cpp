#include "qfi/compare.hpp"

#include <cmath>
#include <functional>

#include "qfi/errors.hpp"
#include "qfi/wigner.hpp"

namespace qfi {
namespace {

RouteOutcome run_route(QfiMethod method, const std::function<QfiEstimate()>& fn) {
  RouteOutcome out{method, std::nullopt, {}};
  try {
    out.estimate = fn();
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

const RouteOutcome* CompareReport::find(QfiMethod method) const {
  for (const auto& r : routes) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

CompareReport compare_routes(const CompareRequest& request) {
  const auto family = models::build_quantum(request.model);
  const auto init = models::initial_state(request.model, request.state);
  const Params lambda = request.lambda.size() ? request.lambda : request.model.reference;
  if (request.parameter >= family.num_parameters()) throw ValidationError("parameter index out of range");

  CompareReport report;
  report.model = std::string(models::to_string(request.model.id));
  report.state = models::to_string(request.state);
  report.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  report.parameter = request.parameter;
  report.t = request.t;

  const auto& psi = init.state;
  report.routes.push_back(run_route(QfiMethod::overlap_fd, [&] {
    return exact::qfi_overlap_fd(family, psi, lambda, request.parameter, request.t, std::nullopt,
                                 request.exact_options);
  }));
  report.routes.push_back(run_route(QfiMethod::generator_variance, [&] {
    const auto g = exact::duhamel_generator(family, lambda, request.parameter, request.t, 16, request.exact_options);
    return exact::qfi_generator_variance(psi, g);
  }));
  report.routes.push_back(run_route(QfiMethod::correlator_integral, [&] {
    return correlator::qfi_correlator_integral(family, psi, lambda, request.parameter, request.t,
                                               request.exact_options);
  }));
  if (models::has_classical_counterpart(request.model.id) && init.gaussian) {
    report.routes.push_back(run_route(QfiMethod::semiclassical_mc, [&] {
      const auto model = models::build_classical(request.model);
      auto cfg = classical::default_stepper(model);
      if (request.dt) cfg.dt = *request.dt;
      return sc::estimate_qfi_sc(model, *init.gaussian, lambda, request.parameter, request.t, request.n_samples, cfg,
                                 request.seed, request.sc_options);
    }));
  } else {
    RouteOutcome unsupported{QfiMethod::semiclassical_mc, std::nullopt, ""};
    unsupported.error = models::has_classical_counterpart(request.model.id)
                            ? "initial state has no Gaussian Wigner function"
                            : "model has no classical counterpart";
    report.routes.push_back(std::move(unsupported));
  }
  for (auto& r : report.routes) {
    if (r.estimate) {
      r.estimate->metadata.warnings.insert(r.estimate->metadata.warnings.end(), init.warnings.begin(),
                                           init.warnings.end());
    }
  }

  for (std::size_t i = 0; i < report.routes.size(); ++i) {
    for (std::size_t j = i + 1; j < report.routes.size(); ++j) {
      const auto& a = report.routes[i];
      const auto& b = report.routes[j];
      if (!a.estimate || !b.estimate) continue;
      const double diff = std::abs(a.estimate->value - b.estimate->value);
      Discrepancy d{a.method, b.method, diff / std::max(1.0, std::abs(b.estimate->value)), std::nullopt};
      const double se = std::hypot(a.estimate->std_error.value_or(0.0), b.estimate->std_error.value_or(0.0));
      if (se > 0.0) d.in_stderr = diff / se;
      report.discrepancies.push_back(d);
    }
  }
  return report;
}

}  // namespace qfi
