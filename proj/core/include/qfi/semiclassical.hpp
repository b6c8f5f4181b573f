#pragma once

#include <cstdint>

#include "qfi/classical.hpp"
#include "qfi/estimate.hpp"
#include "qfi/gaussian_state.hpp"

namespace qfi::sc {

enum class FailurePolicy { fail_fast, drop_and_flag };

struct Options {
  int bootstrap_resamples = 200;
  FailurePolicy failure_policy = FailurePolicy::fail_fast;
  int threads = 1;
  /// Samples per streaming block; the block partition (not the thread count)
  /// fixes the reduction tree.
  std::size_t block_size = 4096;
};

/// Streaming first and second moments of a vector-valued sample.
struct Moments {
  std::size_t count = 0;
  RealVector mean;
  RealMatrix comoment;

  explicit Moments(Eigen::Index dim = 0);
  void add(const double* x);
  static Moments merge(const Moments& a, const Moments& b);
  /// Unbiased (n − 1) covariance.
  RealMatrix covariance() const;
};

/// Per-trajectory ∂S/∂λ vectors for samples of the Wigner ensemble.
struct Ensemble {
  /// n × M, row i is trajectory i.
  RealMatrix d_action;
  std::vector<std::size_t> dropped;
  std::size_t requested = 0;
  double max_energy_drift = 0.0;
};

Ensemble run_ensemble(const classical::ClassicalModel& model, const GaussianStateSpec& gspec,
                      const Params& lambda, double t, std::size_t n, const classical::StepperConfig& cfg,
                      std::uint64_t seed, const Options& options = {});

/// F ≈ (4/ħ²) Var(∂S/∂λ_parameter) with bootstrap standard error.
QfiEstimate estimate_qfi_sc(const classical::ClassicalModel& model, const GaussianStateSpec& gspec,
                            const Params& lambda, std::size_t parameter, double t, std::size_t n,
                            const classical::StepperConfig& cfg, std::uint64_t seed,
                            const Options& options = {});

/// F_ij ≈ (4/ħ²) Cov(∂_iS, ∂_jS) with elementwise bootstrap errors.
QfimEstimate estimate_qfim_sc(const classical::ClassicalModel& model, const GaussianStateSpec& gspec,
                              const Params& lambda, double t, std::size_t n,
                              const classical::StepperConfig& cfg, std::uint64_t seed,
                              const Options& options = {});

/// Blocked streaming covariance of the selected columns with a fixed
/// pairwise merge tree.
RealMatrix streaming_covariance(const RealMatrix& samples, std::size_t block_size);

/// Elementwise standard deviation of the covariance over `resamples`
/// seeded bootstrap resamples of the rows.
RealMatrix bootstrap_covariance_error(const RealMatrix& samples, int resamples, std::uint64_t seed);

}  // namespace qfi::sc
