#include "runner.hpp"

#include <algorithm>

#include "qfi/correlator.hpp"
#include "qfi/errors.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/models.hpp"
#include "qfi/semiclassical.hpp"

namespace qfi::cli {
namespace {

// Fills the metadata some routes cannot know (model name, evaluation point)
// and prepends the initial-state warnings.
template <typename Estimate>
void finish(Estimate& e, const io::RunConfig& config, const Params& lambda, double t,
            const models::InitialState& init, const std::string& discretization) {
  auto& md = e.metadata;
  md.model = std::string(models::to_string(config.model.id));
  md.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  md.parameter = config.target;
  md.t = t;
  if (md.discretization.empty()) md.discretization = discretization;
  md.warnings.insert(md.warnings.begin(), init.warnings.begin(), init.warnings.end());
}

std::string sweep_label(const io::RunConfig& config) {
  return config.sweep_parameter.empty() ? config.target_label : config.sweep_parameter;
}

}  // namespace

std::variant<QfiEstimate, QfimEstimate> estimate(const io::RunConfig& config, double t, const Params& lambda,
                                                 std::optional<std::uint64_t> seed, int threads) {
  const auto& m = config.method;
  const auto init = models::initial_state(config.model, config.state);
  const std::size_t p = config.target;

  if (m.route == QfiMethod::semiclassical_mc) {
    if (!models::has_classical_counterpart(config.model.id)) {
      throw UnsupportedError("model has no classical counterpart");
    }
    if (!seed) throw ValidationError("stochastic route requires a seed");
    if (!init.gaussian) throw UnsupportedError("initial state has no Wigner Gaussian");
    const auto model = models::build_classical(config.model);
    auto cfg = classical::default_stepper(model);
    if (m.dt) cfg.dt = *m.dt;
    sc::Options opts;
    opts.threads = threads;
    opts.bootstrap_resamples = m.bootstrap;
    opts.failure_policy = m.drop_failed ? sc::FailurePolicy::drop_and_flag : sc::FailurePolicy::fail_fast;
    if (config.all_parameters) {
      auto e = sc::estimate_qfim_sc(model, *init.gaussian, lambda, t, m.n_samples, cfg, *seed, opts);
      finish(e, config, lambda, t, init, "");
      return e;
    }
    auto e = sc::estimate_qfi_sc(model, *init.gaussian, lambda, p, t, m.n_samples, cfg, *seed, opts);
    finish(e, config, lambda, t, init, "");
    return e;
  }

  const auto family = models::build_quantum(config.model);
  const auto& psi = init.state;
  if (config.all_parameters) {
    auto e = exact::qfim(family, psi, lambda, t);
    finish(e, config, lambda, t, init, family.discretization());
    return e;
  }
  QfiEstimate e;
  switch (m.route) {
    case QfiMethod::overlap_fd: e = exact::qfi_overlap_fd(family, psi, lambda, p, t, m.dlambda); break;
    case QfiMethod::generator_variance:
      e = exact::qfi_generator_variance(psi, exact::duhamel_generator(family, lambda, p, t, m.quad_order));
      break;
    case QfiMethod::correlator_integral: e = correlator::qfi_correlator_integral(family, psi, lambda, p, t); break;
    case QfiMethod::ctp_lnz: {
      correlator::Options opts;
      opts.threads = threads;
      e = correlator::qfi_from_lnz(family, psi, lambda, p, correlator::TimeGrid(t, m.n_slices), opts);
      break;
    }
    case QfiMethod::semiclassical_mc: break;
  }
  finish(e, config, lambda, t, init, family.discretization());
  return e;
}

io::ResultRecord run_single(const io::RunConfig& config, const Overrides& overrides) {
  if (config.times.size() != 1 || !config.sweep_values.empty() || config.method.seeds.size() > 1) {
    throw ValidationError("run takes a single time, parameter point and seed; use sweep for grids");
  }
  std::optional<std::uint64_t> seed = overrides.seed ? overrides.seed : config.method.seed;
  if (!seed && !config.method.seeds.empty()) seed = config.method.seeds.front();
  const auto result = estimate(config, config.times.front(), config.lambda, seed, overrides.threads);
  if (const auto* q = std::get_if<QfiEstimate>(&result)) return io::to_record(*q, config.target_label);
  return io::to_record(std::get<QfimEstimate>(result));
}

std::vector<io::SweepRow> run_sweep(const io::RunConfig& config, const Overrides& overrides) {
  if (config.all_parameters) throw ValidationError("sweeps estimate a single parameter; target 'all' is not allowed");
  std::vector<std::optional<std::uint64_t>> seeds;
  if (overrides.seed) {
    seeds.push_back(overrides.seed);
  } else if (!config.method.seeds.empty()) {
    seeds.assign(config.method.seeds.begin(), config.method.seeds.end());
  } else {
    seeds.push_back(config.method.seed);
  }
  const auto labels = models::parameter_labels(config.model.id);
  const std::string axis = sweep_label(config);
  const auto axis_index =
      static_cast<Eigen::Index>(std::find(labels.begin(), labels.end(), axis) - labels.begin());
  std::vector<double> values = config.sweep_values;
  if (values.empty()) values.push_back(config.lambda[axis_index]);
  if (config.times.empty() || values.empty()) throw ValidationError("sweep grid is empty");

  std::vector<io::SweepRow> rows;
  for (const auto& seed : seeds) {
    for (double value : values) {
      for (double t : config.times) {
        io::SweepRow row;
        row.t = t;
        row.lambda = value;
        row.method = std::string(to_string(config.method.route));
        Params lambda = config.lambda;
        lambda[axis_index] = value;
        try {
          const auto e = std::get<QfiEstimate>(estimate(config, t, lambda, seed, overrides.threads));
          row.qfi = e.value;
          row.std_error = e.std_error;
        } catch (const std::exception& ex) {
          row.error = ex.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

int report_error(const std::exception& e, std::ostream& err) {
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
    err << "error: not converged: " << c->what() << '\n';
    return kNotConverged;
  }
  if (dynamic_cast<const io::ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const UnsupportedError*>(&e) || dynamic_cast<const ResourceError*>(&e)) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const CausticError*>(&e) ||
      dynamic_cast<const NoBranchError*>(&e) || dynamic_cast<const DomainError*>(&e)) {
    err << "error: route failed: " << e.what() << '\n';
    return kNotConverged;
  }
  err << "error: " << e.what() << '\n';
  return kFailure;
}

}  // namespace qfi::cli
