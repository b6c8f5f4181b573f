#include <benchmark/benchmark.h>

#include <numbers>

#include "qfi/classical.hpp"
#include "qfi/correlator.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/models.hpp"
#include "qfi/semiclassical.hpp"
#include "qfi/wigner.hpp"

using namespace qfi;

namespace {

models::ModelSpec harmonic_spec(int points) {
  auto spec = models::default_spec(models::ModelId::harmonic);
  spec.discretization = models::GridDiscretization{10.0, points};
  return spec;
}

void BM_Propagate(benchmark::State& state) {
  const auto spec = harmonic_spec(static_cast<int>(state.range(0)));
  const auto family = models::build_quantum(spec);
  const auto psi = models::initial_state(spec, models::StateKind::coherent({1.0, 0.0})).state;
  for (auto _ : state) benchmark::DoNotOptimize(exact::propagate(family, spec.reference, 0.0, 1.0, psi));
}
BENCHMARK(BM_Propagate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DuhamelGenerator(benchmark::State& state) {
  const auto spec = harmonic_spec(static_cast<int>(state.range(0)));
  const auto family = models::build_quantum(spec);
  for (auto _ : state) benchmark::DoNotOptimize(exact::duhamel_generator(family, spec.reference, 0, 1.0));
}
BENCHMARK(BM_DuhamelGenerator)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_QfiFromLnZ(benchmark::State& state) {
  const auto spec = harmonic_spec(64);
  const auto family = models::build_quantum(spec);
  const auto psi = models::initial_state(spec, models::StateKind::ground()).state;
  const correlator::TimeGrid grid(std::numbers::pi, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(correlator::qfi_from_lnz(family, psi, spec.reference, 1, grid));
}
BENCHMARK(BM_QfiFromLnZ)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Trajectory(benchmark::State& state) {
  const auto spec = models::default_spec(models::ModelId::quartic);
  const auto model = models::build_classical(spec);
  auto cfg = classical::default_stepper(model);
  cfg.scheme = state.range(0) == 0 ? classical::Scheme::leapfrog : classical::Scheme::rk4;
  const classical::PhaseSpacePoint x0{{1.0}, {0.5}};
  for (auto _ : state) benchmark::DoNotOptimize(classical::integrate_trajectory(model, x0, spec.reference, 10.0, cfg));
}
BENCHMARK(BM_Trajectory)->Arg(0)->Arg(1);

void BM_Sampler(benchmark::State& state) {
  const auto g = wigner::gaussian_for(models::default_spec(models::ModelId::lattice_scalar), models::StateKind::ground());
  const wigner::GaussianSampler sampler(g);
  std::vector<double> out(4);
  std::uint64_t i = 0;
  for (auto _ : state) {
    sampler.fill(1, i++, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Sampler);

void BM_SemiclassicalEstimate(benchmark::State& state) {
  const auto spec = models::default_spec(models::ModelId::harmonic);
  const auto model = models::build_classical(spec);
  const auto g = wigner::gaussian_for(spec, models::StateKind::ground());
  const auto cfg = classical::default_stepper(model);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sc::estimate_qfi_sc(model, g, spec.reference, 1, std::numbers::pi, n, cfg, 1));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_SemiclassicalEstimate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
