// qfi: quantum Fisher information of dynamically encoded parameters.
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qfi/acceptance/suite.hpp"
#include "qfi/compare.hpp"
#include "qfi/errors.hpp"
#include "qfi/io/config.hpp"
#include "qfi/io/records.hpp"
#include "qfi/models.hpp"
#include "runner.hpp"

namespace {

using namespace qfi;

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool quiet = false;
};

io::RunConfig load(const Globals& g) {
  if (g.config.empty()) throw ValidationError("--config PATH is required");
  return io::load_config(g.config, g.seed);
}

std::string output_path(const Globals& g, const io::RunConfig& config) {
  return g.out.empty() ? config.output.path : g.out;
}

int cmd_models(const Globals& g) {
  for (auto id : {models::ModelId::qubit_phase, models::ModelId::qubit_mixed_axis, models::ModelId::harmonic,
                  models::ModelId::quartic, models::ModelId::driven_oscillator, models::ModelId::lattice_scalar}) {
    const auto spec = models::default_spec(id);
    const auto labels = models::parameter_labels(id);
    std::cout << models::to_string(id) << "\n  " << models::describe(id) << "\n  parameters:";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::cout << ' ' << labels[i] << '=' << spec.reference[static_cast<Eigen::Index>(i)];
    }
    std::cout << "\n  classical counterpart: " << (models::has_classical_counterpart(id) ? "yes" : "no") << '\n';
    if (!g.quiet) std::cout << '\n';
  }
  return cli::kOk;
}

int cmd_run(const Globals& g) {
  const auto config = load(g);
  const auto record = cli::run_single(config, {g.seed, g.threads});
  const auto path = output_path(g, config);
  if (path.empty()) {
    std::cout << io::serialize(record) << '\n';
  } else {
    io::append_jsonl(path, record);
    if (!g.quiet) std::cout << record.method << ' ' << record.target << " t=" << record.t << " qfi="
                            << std::setprecision(12) << record.qfi.value_or(NAN) << " -> " << path << '\n';
  }
  return cli::kOk;
}

int cmd_sweep(const Globals& g) {
  const auto config = load(g);
  const auto rows = cli::run_sweep(config, {g.seed, g.threads});
  const auto path = output_path(g, config);
  if (path.empty()) {
    std::cout << io::sweep_csv(rows);
  } else {
    io::write_sweep_csv(path, rows);
  }
  std::size_t failed = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      ++failed;
      if (!g.quiet) std::cerr << "t=" << row.t << " lambda=" << row.lambda << ": " << row.error << '\n';
    }
  }
  if (failed == rows.size()) {
    std::cerr << "error: every sweep point failed\n";
    return cli::kNotConverged;
  }
  return cli::kOk;
}

int cmd_compare(const Globals& g) {
  const auto config = load(g);
  if (config.times.size() != 1) throw ValidationError("compare takes a single evolution time");
  CompareRequest req;
  req.model = config.model;
  req.state = config.state;
  req.lambda = config.lambda;
  req.parameter = config.target;
  req.t = config.times.front();
  req.n_samples = config.method.n_samples;
  req.seed = g.seed.value_or(config.method.seed.value_or(1));
  req.dt = config.method.dt;
  req.sc_options.threads = g.threads;
  req.sc_options.bootstrap_resamples = config.method.bootstrap;
  const auto report = compare_routes(req);

  std::cout << report.model << ' ' << report.state << " parameter=" << config.target_label << " t=" << report.t
            << '\n';
  const auto path = output_path(g, config);
  for (const auto& r : report.routes) {
    std::cout << "  " << std::left << std::setw(20) << to_string(r.method);
    if (r.estimate) {
      std::cout << std::setprecision(12) << r.estimate->value;
      if (r.estimate->std_error) std::cout << " ± " << std::setprecision(3) << *r.estimate->std_error;
      if (!path.empty()) io::append_jsonl(path, io::to_record(*r.estimate, config.target_label));
    } else {
      std::cout << "unavailable: " << r.error;
    }
    std::cout << '\n';
  }
  for (const auto& d : report.discrepancies) {
    std::cout << "  " << to_string(d.a) << " vs " << to_string(d.b) << ": rel " << std::setprecision(3)
              << std::scientific << d.relative;
    if (d.in_stderr) std::cout << std::fixed << " (" << *d.in_stderr << " stderr)";
    std::cout << std::defaultfloat << '\n';
  }
  return cli::kOk;
}

int cmd_verify(const Globals& g, bool inject, const std::vector<int>& only) {
  acceptance::SuiteOptions opts;
  opts.threads = g.threads;
  opts.inject_sign_flip = inject;
  opts.only = only;
  opts.stream = !g.quiet;
  const auto results = acceptance::run_suite(opts);
  const auto table = acceptance::format_table(results);
  if (g.quiet) {
    std::cout << table;
  } else {
    std::cout << table.substr(table.rfind('\n', table.size() - 2) + 1);
  }
  if (!g.out.empty()) {
    std::ofstream(g.out) << table;
  }
  return acceptance::all_passed(results) ? cli::kOk : cli::kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information of dynamically encoded parameters"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output path (JSON lines for run, CSV for sweep)");
  app.add_option("--seed", g.seed, "seed override for stochastic routes");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  auto* models_cmd = app.add_subcommand("models", "list the model catalog");
  auto* run_cmd = app.add_subcommand("run", "one estimate from a config");
  auto* sweep_cmd = app.add_subcommand("sweep", "estimates over a time, parameter or seed grid");
  auto* compare_cmd = app.add_subcommand("compare", "run every applicable route and report discrepancies");
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  bool inject = false;
  std::vector<int> only;
  verify_cmd->add_flag("--inject-sign-flip", inject, "negate the harmonic omega deformation (mutation check)");
  verify_cmd->add_option("--only", only, "criterion ids to run");
  for (auto* sub : {models_cmd, run_cmd, sweep_cmd, compare_cmd, verify_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kInvalid;
  }

  try {
    if (*models_cmd) return cmd_models(g);
    if (*run_cmd) return cmd_run(g);
    if (*sweep_cmd) return cmd_sweep(g);
    if (*compare_cmd) return cmd_compare(g);
    if (*verify_cmd) return cmd_verify(g, inject, only);
  } catch (const std::exception& e) {
    return cli::report_error(e, std::cerr);
  }
  return cli::kOk;
}
