#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfi/estimate.hpp"
#include "qfi/models.hpp"

namespace qfi::io {

/// Config rejection with a location ("config.json:12: method.seed: ...").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string section, std::string key, int line, const std::string& message);
  const std::string& section() const noexcept { return section_; }
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string section_;
  std::string key_;
  int line_;
};

struct MethodConfig {
  QfiMethod route = QfiMethod::generator_variance;
  std::optional<double> dlambda;
  int quad_order = 16;
  int n_slices = 32;
  std::size_t n_samples = 10000;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  int bootstrap = 200;
  bool drop_failed = false;
};

struct OutputConfig {
  std::string path;
  std::string format = "jsonl";
};

struct RunConfig {
  models::ModelSpec model;
  models::StateKind state;
  /// Evaluation point (defaults to the model reference parameters).
  Params lambda;
  /// Index of the estimated parameter.
  std::size_t target = 0;
  std::string target_label;
  /// target = "all": estimate the full QFIM instead of one entry.
  bool all_parameters = false;
  /// Sweep axis over a parameter (name, values); empty when absent.
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::vector<double> times;
  MethodConfig method;
  OutputConfig output;
};

/// Parses and validates a config document. `source_name` prefixes diagnostics.
/// A seed override counts as the method seed during validation.
RunConfig parse_config(const std::string& text, const std::string& source_name = "config",
                       std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace qfi::io
