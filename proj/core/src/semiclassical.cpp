#include "qfi/semiclassical.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "qfi/errors.hpp"
#include "qfi/parallel.hpp"
#include "qfi/rng.hpp"
#include "qfi/wigner.hpp"

namespace qfi::sc {
namespace {

constexpr std::size_t kMinSamples = 100;

Moments merge_range(const std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return Moments::merge(merge_range(blocks, lo, mid), merge_range(blocks, mid, hi));
}

// Entry (i, j) depends only on columns i and j with a fixed summation order,
// so a sub-block of columns reproduces the same numbers bit for bit.
RealMatrix plain_covariance(const RealMatrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  RealVector mean(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) s += x(r, j);
    mean[j] = s / static_cast<double>(n);
  }
  RealMatrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < n; ++r) s += (x(r, i) - mean[i]) * (x(r, j) - mean[j]);
      c(i, j) = c(j, i) = s / static_cast<double>(n - 1);
    }
  }
  return c;
}

EstimateMetadata base_metadata(const classical::ClassicalModel& model, const Params& lambda, std::size_t parameter,
                               double t, std::size_t n, const classical::StepperConfig& cfg, std::uint64_t seed,
                               const GaussianStateSpec& gspec, const Ensemble& ens) {
  EstimateMetadata md;
  md.model = model.id;
  md.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  md.parameter = parameter;
  md.t = t;
  md.seed = seed;
  md.n_samples = n;
  md.dt = cfg.dt;
  md.discretization = cfg.scheme == classical::Scheme::leapfrog ? "leapfrog" : "rk4";
  md.tolerances["max_energy_drift"] = ens.max_energy_drift;
  if (!gspec.exact) md.warnings.push_back("initial Wigner function is a moment-matched Gaussian, not exact");
  if (!ens.dropped.empty()) {
    md.dropped_fraction = static_cast<double>(ens.dropped.size()) / static_cast<double>(ens.requested);
    md.warnings.push_back(std::to_string(ens.dropped.size()) + " diverging trajectories dropped");
  }
  return md;
}

}  // namespace

Moments::Moments(Eigen::Index dim) : mean(RealVector::Zero(dim)), comoment(RealMatrix::Zero(dim, dim)) {}

void Moments::add(const double* x) {
  const Eigen::Map<const RealVector> v(x, mean.size());
  ++count;
  const RealVector delta = v - mean;
  mean += delta / static_cast<double>(count);
  const RealVector after = v - mean;
  // Symmetrized update; the diagonal reduces to delta * after exactly.
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      comoment(i, j) += 0.5 * (delta[i] * after[j] + delta[j] * after[i]);
      comoment(j, i) = comoment(i, j);
    }
  }
}

Moments Moments::merge(const Moments& a, const Moments& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  Moments out(a.mean.size());
  out.count = a.count + b.count;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  const double n = na + nb;
  const RealVector delta = b.mean - a.mean;
  out.mean = a.mean + delta * (nb / n);
  const double w = na * nb / n;
  out.comoment = a.comoment + b.comoment;
  for (Eigen::Index j = 0; j < delta.size(); ++j) {
    for (Eigen::Index i = 0; i < delta.size(); ++i) out.comoment(i, j) += (delta[i] * delta[j]) * w;
  }
  return out;
}

RealMatrix Moments::covariance() const {
  if (count < 2) throw ValidationError("covariance needs at least two samples");
  return comoment / static_cast<double>(count - 1);
}

RealMatrix streaming_covariance(const RealMatrix& samples, std::size_t block_size) {
  if (samples.rows() < 2) throw ValidationError("covariance needs at least two samples");
  const auto rows = static_cast<std::size_t>(samples.rows());
  const std::size_t bs = std::max<std::size_t>(1, block_size);
  // Row-major copy so each sample is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = samples;
  std::vector<Moments> blocks;
  for (std::size_t lo = 0; lo < rows; lo += bs) {
    Moments m(samples.cols());
    for (std::size_t i = lo; i < std::min(rows, lo + bs); ++i) m.add(rm.row(static_cast<Eigen::Index>(i)).data());
    blocks.push_back(std::move(m));
  }
  return merge_range(blocks, 0, blocks.size()).covariance();
}

RealMatrix bootstrap_covariance_error(const RealMatrix& samples, int resamples, std::uint64_t seed) {
  const auto n = samples.rows();
  const auto m = samples.cols();
  if (n < 2) throw ValidationError("bootstrap needs at least two samples");
  if (resamples < 2) throw ValidationError("bootstrap needs at least two resamples");
  RealMatrix mean = RealMatrix::Zero(m, m);
  RealMatrix sq = RealMatrix::Zero(m, m);
  RealMatrix draw(n, m);
  for (int b = 0; b < resamples; ++b) {
    CounterRng rng(seed ^ 0xb0075fa9ULL, static_cast<std::uint64_t>(b));
    for (Eigen::Index i = 0; i < n; ++i) draw.row(i) = samples.row(static_cast<Eigen::Index>(rng.below(n)));
    const RealMatrix c = plain_covariance(draw);
    const RealMatrix delta = c - mean;
    mean += delta / static_cast<double>(b + 1);
    sq += delta.cwiseProduct(c - mean);
  }
  return (sq / static_cast<double>(resamples - 1)).cwiseSqrt();
}

Ensemble run_ensemble(const classical::ClassicalModel& model, const GaussianStateSpec& gspec, const Params& lambda,
                      double t, std::size_t n, const classical::StepperConfig& cfg, std::uint64_t seed,
                      const Options& options) {
  if (gspec.dof() != model.dof) throw ValidationError("Gaussian state and model disagree on degrees of freedom");
  const wigner::GaussianSampler sampler(gspec);
  const auto m = static_cast<Eigen::Index>(model.num_parameters());
  RealMatrix raw(static_cast<Eigen::Index>(n), m);
  std::vector<char> failed(n, 0);
  std::vector<double> drift(n, 0.0);
  std::vector<double> fail_time(n, 0.0);

  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto x0 = sampler.at(seed, i);
    try {
      const auto traj = classical::integrate_trajectory(model, x0, lambda, t, cfg);
      for (Eigen::Index k = 0; k < m; ++k) raw(static_cast<Eigen::Index>(i), k) = traj.d_action[k];
      drift[i] = traj.energy_drift;
    } catch (const DivergenceError& e) {
      failed[i] = 1;
      fail_time[i] = e.time();
    }
  });

  Ensemble ens;
  ens.requested = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) ens.dropped.push_back(i);
  }
  if (!ens.dropped.empty() && options.failure_policy == FailurePolicy::fail_fast) {
    throw DivergenceError(std::to_string(ens.dropped.size()) + " trajectories diverged",
                          fail_time[ens.dropped.front()], ens.dropped);
  }
  ens.d_action.resize(static_cast<Eigen::Index>(n - ens.dropped.size()), m);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) continue;
    ens.d_action.row(row++) = raw.row(static_cast<Eigen::Index>(i));
    ens.max_energy_drift = std::max(ens.max_energy_drift, drift[i]);
  }
  return ens;
}

QfiEstimate estimate_qfi_sc(const classical::ClassicalModel& model, const GaussianStateSpec& gspec,
                            const Params& lambda, std::size_t parameter, double t, std::size_t n,
                            const classical::StepperConfig& cfg, std::uint64_t seed, const Options& options) {
  const auto start = std::chrono::steady_clock::now();
  if (parameter >= model.num_parameters()) throw ValidationError("parameter index out of range");
  if (n < kMinSamples) throw ValidationError("semiclassical estimate needs at least 100 samples");
  const Ensemble ens = run_ensemble(model, gspec, lambda, t, n, cfg, seed, options);
  if (ens.d_action.rows() < 2) throw DivergenceError("fewer than two trajectories survived", t, ens.dropped);
  const RealMatrix column = ens.d_action.col(static_cast<Eigen::Index>(parameter));
  const double scale = 4.0 / (gspec.hbar * gspec.hbar);

  QfiEstimate est;
  est.method = QfiMethod::semiclassical_mc;
  est.metadata = base_metadata(model, lambda, parameter, t, n, cfg, seed, gspec, ens);
  est.value = scale * streaming_covariance(column, options.block_size)(0, 0);
  est.std_error = scale * bootstrap_covariance_error(column, options.bootstrap_resamples, seed)(0, 0);
  est.metadata.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return est;
}

QfimEstimate estimate_qfim_sc(const classical::ClassicalModel& model, const GaussianStateSpec& gspec,
                              const Params& lambda, double t, std::size_t n, const classical::StepperConfig& cfg,
                              std::uint64_t seed, const Options& options) {
  const auto start = std::chrono::steady_clock::now();
  if (n < kMinSamples) throw ValidationError("semiclassical estimate needs at least 100 samples");
  const Ensemble ens = run_ensemble(model, gspec, lambda, t, n, cfg, seed, options);
  if (ens.d_action.rows() < 2) throw DivergenceError("fewer than two trajectories survived", t, ens.dropped);
  const double scale = 4.0 / (gspec.hbar * gspec.hbar);

  QfimEstimate est;
  est.method = QfiMethod::semiclassical_mc;
  est.metadata = base_metadata(model, lambda, 0, t, n, cfg, seed, gspec, ens);
  est.value = scale * streaming_covariance(ens.d_action, options.block_size);
  est.std_error = scale * bootstrap_covariance_error(ens.d_action, options.bootstrap_resamples, seed);
  est.metadata.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return est;
}

}  // namespace qfi::sc
