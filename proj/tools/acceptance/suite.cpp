#include "qfi/acceptance/suite.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qfi/correlator.hpp"
#include "qfi/errors.hpp"
#include "qfi/exact_engine.hpp"
#include "qfi/io/records.hpp"
#include "qfi/models.hpp"
#include "qfi/rng.hpp"
#include "qfi/semiclassical.hpp"

namespace qfi::acceptance {
namespace {

using models::ModelId;
using models::ModelSpec;
using models::StateKind;
constexpr double kPi = std::numbers::pi;

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

class Suite {
 public:
  explicit Suite(const SuiteOptions& o) : opt_(o) {}

  // Catalog family, with the ω deformation negated under fault injection.
  HamiltonianFamily family(const ModelSpec& spec) const {
    HamiltonianFamily f = models::build_quantum(spec);
    if (!opt_.inject_sign_flip || spec.id != ModelId::harmonic) return f;
    auto def = f.definition();
    auto inner = def.deformations;
    def.deformations = [inner](const Params& l, double t) {
      auto d = inner(l, t);
      d[0] = -d[0];
      return d;
    };
    return HamiltonianFamily(std::move(def));
  }

  classical::ClassicalModel classical_model(const ModelSpec& spec) const {
    auto m = models::build_classical(spec);
    if (opt_.inject_sign_flip && spec.id == ModelId::harmonic) {
      auto inner = m.dlagrangian;
      m.dlagrangian = [inner](classical::ConstSpan q, classical::ConstSpan v, const Params& l, double t,
                              classical::MutSpan out) {
        inner(q, v, l, t, out);
        out[0] = -out[0];
      };
    }
    return m;
  }

  sc::Options sc_options() const {
    sc::Options o;
    o.threads = opt_.threads;
    return o;
  }

  // {overlap_fd, generator_variance, correlator_integral}
  static std::array<double, 3> triple(const HamiltonianFamily& f, const QuantumState& psi, const Params& lambda,
                                      std::size_t p, double t) {
    const double fd = exact::qfi_overlap_fd(f, psi, lambda, p, t).value;
    const double gv = exact::qfi_generator_variance(psi, exact::duhamel_generator(f, lambda, p, t)).value;
    const double ci = correlator::qfi_correlator_integral(f, psi, lambda, p, t).value;
    return {fd, gv, ci};
  }

  static double max_pairwise(const std::array<double, 3>& v) {
    return std::max({rel(v[0], v[1]), rel(v[0], v[2]), rel(v[1], v[2])});
  }

  CriterionResult c1() const {
    struct Case {
      ModelSpec spec;
      StateKind state;
      std::size_t parameter;
      std::array<double, 3> lambdas;
    };
    auto harmonic = models::default_spec(ModelId::harmonic);
    std::get<models::GridDiscretization>(harmonic.discretization).points = 128;
    auto quartic = models::default_spec(ModelId::quartic);
    std::get<models::GridDiscretization>(quartic.discretization).points = 128;
    const std::vector<Case> cases = {
        {models::default_spec(ModelId::qubit_phase), StateKind::plus(), 0, {0.5, 1.0, 1.5}},
        {models::default_spec(ModelId::qubit_mixed_axis), StateKind::plus(), 0, {0.1, 0.3, 0.6}},
        {harmonic, StateKind::ground(), 0, {0.8, 1.0, 1.2}},
        {harmonic, StateKind::ground(), 1, {0.0, 0.5, 1.0}},
        {quartic, StateKind::ground(), 0, {0.05, 0.1, 0.15}},
    };
    const std::array<double, 3> times = {0.5, 1.0, 2.0};
    double worst = 0.0;
    std::string where;
    for (const auto& c : cases) {
      const auto f = family(c.spec);
      const auto psi = models::initial_state(c.spec, c.state).state;
      for (double l : c.lambdas) {
        Params lambda = c.spec.reference;
        lambda[static_cast<Eigen::Index>(c.parameter)] = l;
        for (double t : times) {
          const double d = max_pairwise(triple(f, psi, lambda, c.parameter, t));
          if (d > worst) {
            worst = d;
            where = fmt("%s/%s λ=%g t=%g", std::string(models::to_string(c.spec.id)).c_str(),
                        f.labels()[c.parameter].c_str(), l, t);
          }
        }
      }
    }
    return {1, "exact-route triple agreement", worst < 1e-5,
            fmt("max pairwise rel %.2e (limit 1e-5) at %s", worst, where.c_str()), 0.0};
  }

  CriterionResult c2() const {
    const auto spec = models::default_spec(ModelId::harmonic);
    const auto f = family(spec);
    const auto psi = models::initial_state(spec, StateKind::ground()).state;
    double worst = 0.0;
    for (double t : {kPi / 4, kPi / 2, kPi}) {
      const double oracle = 4.0 * (1.0 - std::cos(t));
      for (double v : triple(f, psi, spec.reference, 1, t)) worst = std::max(worst, std::abs(v - oracle) / oracle);
    }
    return {2, "force-sensing oracle 4(1-cos t)", worst < 1e-3, fmt("max rel error %.2e (limit 1e-3)", worst), 0.0};
  }

  CriterionResult c3() const {
    const auto spec = models::default_spec(ModelId::qubit_phase);
    const auto f = family(spec);
    const auto psi = models::initial_state(spec, StateKind::plus()).state;
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      for (double v : triple(f, psi, spec.reference, 0, t)) worst = std::max(worst, std::abs(v - t * t));
    }
    return {3, "qubit phase oracle F = t^2", worst < 1e-6, fmt("max abs error %.2e (limit 1e-6)", worst), 0.0};
  }

  CriterionResult c4() const {
    struct Case {
      ModelSpec spec;
      StateKind state;
      std::size_t parameter;
      double t;
    };
    auto harmonic = models::default_spec(ModelId::harmonic);
    std::get<models::GridDiscretization>(harmonic.discretization).points = 128;
    const std::vector<Case> cases = {
        {models::default_spec(ModelId::qubit_mixed_axis), StateKind::plus(), 0, 2.0},
        {harmonic, StateKind::coherent({1.0, 0.0}), 0, 2.0},
    };
    double worst_identity = 0.0;
    double ratio_lo = 1e300, ratio_hi = 0.0;
    CounterRng rng(4, 0);
    for (const auto& c : cases) {
      const auto f = family(c.spec);
      const auto psi = models::initial_state(c.spec, c.state).state;
      const Matrix o = -f.deformation_at(c.spec.reference, c.parameter);
      const correlator::TimeGrid grid(c.t, 16);
      const correlator::Contour contour(f, psi, c.spec.reference, grid, o);
      for (int pair = 0; pair < 5; ++pair) {
        const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.n_nodes())));
        const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.n_nodes())));
        const auto md = contour.mixed_derivative(a, b, 1e-3);
        const auto cw = contour.connected_wightman(a, b);
        // Normalized by the Cauchy-Schwarz scale of the correlator.
        const double scale =
            std::sqrt(std::abs(contour.connected_wightman(a, a)) * std::abs(contour.connected_wightman(b, b)));
        worst_identity = std::max(worst_identity, std::abs(md - cw) / std::max(scale, 1e-300));
      }
      const double ref = correlator::qfi_correlator_integral(f, psi, c.spec.reference, c.parameter, c.t).value;
      double previous = 0.0;
      for (int n : {8, 16, 32}) {
        const double err =
            std::abs(correlator::qfi_from_lnz(f, psi, c.spec.reference, c.parameter, correlator::TimeGrid(c.t, n)).value -
                     ref);
        if (previous > 0.0) {
          ratio_lo = std::min(ratio_lo, previous / err);
          ratio_hi = std::max(ratio_hi, previous / err);
        }
        previous = err;
      }
    }
    const bool ok = worst_identity < 5e-5 && ratio_lo >= 3.5 && ratio_hi <= 4.5;
    return {4, "closed-time-path identity", ok,
            fmt("mixed-difference rel %.2e (limit 5e-5); slice-doubling ratios [%.3f, %.3f] (limit [3.5, 4.5])",
                worst_identity, ratio_lo, ratio_hi),
            0.0};
  }

  CriterionResult c5() const {
    double worst = 0.0;
    std::string where;
    for (auto id : {ModelId::qubit_phase, ModelId::qubit_mixed_axis, ModelId::harmonic, ModelId::quartic,
                    ModelId::driven_oscillator, ModelId::lattice_scalar}) {
      auto spec = models::default_spec(id);
      StateKind state = StateKind::coherent({1.0, 0.0});
      if (!models::has_classical_counterpart(id)) state = StateKind::plus();
      if (id == ModelId::lattice_scalar) state = StateKind::ground();
      const auto f = family(spec);
      const auto psi = models::initial_state(spec, state).state;
      for (std::size_t p = 0; p < f.num_parameters(); ++p) {
        const double r = exact::insertion_amplitude_check(f, psi, spec.reference, p, 1.0);
        if (r > worst) {
          worst = r;
          where = std::string(models::to_string(id)) + "/" + f.labels()[p];
        }
      }
    }
    return {5, "insertion-as-operator residual", worst < 1e-5,
            fmt("max residual %.2e (limit 1e-5) at %s", worst, where.c_str()), 0.0};
  }

  QfiEstimate force_sc(std::uint64_t seed, int threads) const {
    const auto spec = models::default_spec(ModelId::harmonic);
    const auto model = classical_model(spec);
    const auto gspec = *models::initial_state(spec, StateKind::ground()).gaussian;
    auto o = sc_options();
    o.threads = threads;
    return sc::estimate_qfi_sc(model, gspec, spec.reference, 1, kPi, 100000, classical::default_stepper(model), seed,
                               o);
  }

  CriterionResult c6() const {
    double worst_z = 0.0, worst_se = 0.0;
    std::string values;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto e = force_sc(seed, opt_.threads);
      worst_z = std::max(worst_z, std::abs(e.value - 8.0) / *e.std_error);
      worst_se = std::max(worst_se, *e.std_error / e.value);
      values += fmt("%s%.4f±%.4f", values.empty() ? "" : ", ", e.value, *e.std_error);
    }
    return {6, "semiclassical exactness, linear generator", worst_z <= 4.0 && worst_se < 0.01,
            fmt("F = %s; max |F-8|/se %.2f (limit 4); max se/F %.2e (limit 1e-2)", values.c_str(), worst_z, worst_se),
            0.0};
  }

  static ModelSpec coherent_spec(double alpha2) {
    auto spec = models::default_spec(ModelId::harmonic);
    if (alpha2 > 20.0) spec.discretization = models::GridDiscretization{20.0, 512};
    return spec;
  }

  QfiEstimate omega_sc(double alpha2, std::uint64_t seed, int threads) const {
    const auto spec = coherent_spec(alpha2);
    const auto model = classical_model(spec);
    const auto gspec = *models::initial_state(spec, StateKind::coherent({std::sqrt(alpha2), 0.0})).gaussian;
    auto o = sc_options();
    o.threads = threads;
    return sc::estimate_qfi_sc(model, gspec, spec.reference, 0, 1.0, kScalingSamples,
                               classical::default_stepper(model), seed, o);
  }

  static constexpr std::size_t kScalingSamples = 1000000;

  CriterionResult c7() const {
    std::vector<double> dev;
    std::string values;
    for (double a2 : {4.0, 16.0, 64.0}) {
      const auto spec = coherent_spec(a2);
      const auto f = family(spec);
      const auto psi = models::initial_state(spec, StateKind::coherent({std::sqrt(a2), 0.0})).state;
      const double exact = exact::qfi_generator_variance(psi, exact::duhamel_generator(f, spec.reference, 0, 1.0)).value;
      const auto e = omega_sc(a2, 7, opt_.threads);
      dev.push_back(std::abs(e.value - exact) / exact);
      values += fmt("%s|a|^2=%g: exact %.4f, mc %.4f±%.4f, dev %.2e", values.empty() ? "" : "; ", a2, exact, e.value,
                    *e.std_error, dev.back());
    }
    const double r1 = dev[0] / dev[1];
    const double r2 = dev[1] / dev[2];
    const bool ok = dev[0] > dev[1] && dev[1] > dev[2] && r1 >= 2.5 && r1 <= 6.0 && r2 >= 2.5 && r2 <= 6.0;
    return {7, "semiclassical leading-order scaling", ok,
            values + fmt("; shrink factors %.2f, %.2f (limit [2.5, 6])", r1, r2), 0.0};
  }

  QfimEstimate qfim_sc(std::uint64_t seed, int threads) const {
    const auto spec = qfim_spec();
    const auto model = classical_model(spec);
    const auto gspec = *models::initial_state(spec, StateKind::coherent({1.0, 0.0})).gaussian;
    auto o = sc_options();
    o.threads = threads;
    return sc::estimate_qfim_sc(model, gspec, qfim_lambda(), 1.0, 20000, classical::default_stepper(model), seed, o);
  }

  static ModelSpec qfim_spec() {
    auto spec = models::default_spec(ModelId::harmonic);
    std::get<models::GridDiscretization>(spec.discretization).points = 128;
    return spec;
  }
  static Params qfim_lambda() { return (Params(2) << 1.0, 0.5).finished(); }

  CriterionResult c8() const {
    const auto spec = qfim_spec();
    const auto f = family(spec);
    const auto psi = models::initial_state(spec, StateKind::coherent({1.0, 0.0})).state;
    const Params lambda = qfim_lambda();
    const double t = 1.0;
    const auto q = exact::qfim(f, psi, lambda, t);
    const bool symmetric = q.value == q.value.transpose();
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(q.value);
    const double min_eig = es.eigenvalues().minCoeff();
    double diag = 0.0;
    for (std::size_t p = 0; p < 2; ++p) {
      const double v = q.value(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
      for (double s : triple(f, psi, lambda, p, t)) diag = std::max(diag, rel(v, s));
    }
    const auto model = classical_model(spec);
    const auto gspec = *models::initial_state(spec, StateKind::coherent({1.0, 0.0})).gaussian;
    const auto m = qfim_sc(5, opt_.threads);
    bool shared = true;
    for (std::size_t p = 0; p < 2; ++p) {
      const auto e = sc::estimate_qfi_sc(model, gspec, lambda, p, t, 20000, classical::default_stepper(model), 5,
                                         sc_options());
      const auto i = static_cast<Eigen::Index>(p);
      shared = shared && e.value == m.value(i, i) && *e.std_error == (*m.std_error)(i, i);
    }
    const bool ok = symmetric && min_eig > -1e-8 && diag < 1e-6 && shared;
    return {8, "QFIM properties", ok,
            fmt("symmetric %s; min eigenvalue %.3e (limit > -1e-8); diagonal vs routes rel %.2e (limit 1e-6); "
                "MC diagonal identical to single-parameter %s",
                symmetric ? "yes" : "no", min_eig, diag, shared ? "yes" : "no"),
            0.0};
  }

  QfiEstimate lattice_sc(std::uint64_t seed, int threads) const {
    const auto spec = models::default_spec(ModelId::lattice_scalar);
    const auto model = classical_model(spec);
    const auto gspec = *models::initial_state(spec, StateKind::ground()).gaussian;
    auto o = sc_options();
    o.threads = threads;
    return sc::estimate_qfi_sc(model, gspec, spec.reference, 0, 1.0, 100000, classical::default_stepper(model), seed,
                               o);
  }

  CriterionResult c9() const {
    const auto spec = models::default_spec(ModelId::lattice_scalar);
    const auto f = family(spec);
    const auto psi = models::initial_state(spec, StateKind::ground()).state;
    const auto v = triple(f, psi, spec.reference, 0, 1.0);
    const double agreement = max_pairwise(v);
    const auto e = lattice_sc(9, opt_.threads);
    const double z = std::abs(e.value - v[1]) / *e.std_error;
    return {9, "lattice field smoke test", agreement < 1e-4 && z <= 4.0,
            fmt("exact %.6f, triple rel %.2e (limit 1e-4); MC %.6f±%.6f, |MC-exact|/se %.2f (limit 4)", v[1],
                agreement, e.value, *e.std_error, z),
            0.0};
  }

  static std::string persisted(const QfiEstimate& e) {
    auto r = io::to_record(e, "x");
    r.runtime_ms = 0.0;
    return io::serialize(r);
  }
  static std::string persisted(const QfimEstimate& e) {
    auto r = io::to_record(e);
    r.runtime_ms = 0.0;
    return io::serialize(r);
  }

  CriterionResult c10() const {
    // Same seed, rerun, and a different worker count: persisted lines must match byte for byte.
    const int other = opt_.threads == 1 ? 3 : 1;
    int checked = 0, identical = 0;
    auto check = [&](const std::string& a, const std::string& b, const std::string& c) {
      checked += 2;
      identical += (a == b) + (a == c);
    };
    check(persisted(force_sc(1, opt_.threads)), persisted(force_sc(1, opt_.threads)), persisted(force_sc(1, other)));
    check(persisted(qfim_sc(5, opt_.threads)), persisted(qfim_sc(5, opt_.threads)), persisted(qfim_sc(5, other)));
    check(persisted(lattice_sc(9, opt_.threads)), persisted(lattice_sc(9, opt_.threads)),
          persisted(lattice_sc(9, other)));
    return {10, "determinism of stochastic criteria", identical == checked,
            fmt("%d/%d reruns byte-identical (threads %d and %d)", identical, checked, opt_.threads, other), 0.0};
  }

 private:
  SuiteOptions opt_;
};

}  // namespace

std::vector<CriterionResult> run_suite(const SuiteOptions& options) {
  const Suite suite(options);
  const std::vector<std::pair<int, std::function<CriterionResult()>>> criteria = {
      {1, [&] { return suite.c1(); }}, {2, [&] { return suite.c2(); }},  {3, [&] { return suite.c3(); }},
      {4, [&] { return suite.c4(); }}, {5, [&] { return suite.c5(); }},  {6, [&] { return suite.c6(); }},
      {7, [&] { return suite.c7(); }}, {8, [&] { return suite.c8(); }},  {9, [&] { return suite.c9(); }},
      {10, [&] { return suite.c10(); }},
  };
  // Wall-clock limits for the criteria that carry one.
  const std::vector<std::pair<int, double>> limits = {{1, 30.0}, {4, 120.0}, {6, 60.0}, {9, 120.0}};

  std::vector<CriterionResult> results;
  for (const auto& [id, run] : criteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& [lid, limit] : limits) {
      if (lid == id && r.seconds > limit) {
        r.passed = false;
        r.detail += fmt("; runtime %.1f s over the %.0f s limit", r.seconds, limit);
      }
    }
    if (options.stream) std::cout << format_row(r) << std::flush;
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_row(const CriterionResult& r) {
  return fmt("%-4s %-4s %-42s %7.1f s  ", ("C" + std::to_string(r.id)).c_str(), r.passed ? "PASS" : "FAIL",
             r.title.c_str(), r.seconds) +
         r.detail + "\n";
}

std::string format_table(const std::vector<CriterionResult>& results) {
  std::string out;
  for (const auto& r : results) out += format_row(r);
  int passed = 0;
  for (const auto& r : results) passed += r.passed;
  out += fmt("%d/%zu criteria passed\n", passed, results.size());
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

}  // namespace qfi::acceptance
