#include "qfi/io/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qfi/errors.hpp"

namespace qfi::io {
namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort source line of "key" inside "section"; 0 when not found.
int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::size_t from = 0;
  if (!section.empty()) {
    from = text.find('"' + section + '"');
    if (from == std::string::npos) return 0;
  }
  if (key.empty()) return line_of_offset(text, from);
  const auto at = text.find('"' + key + '"', from);
  return at == std::string::npos ? line_of_offset(text, from) : line_of_offset(text, at);
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
    const int line = locate(text_, section, key);
    throw ConfigError(section, key, line, source_ + ":" + std::to_string(line) + ": " + section +
                                               (key.empty() ? "" : "." + key) + ": " + msg);
  }

  const json& section(const json& root, const std::string& name, bool required) const {
    static const json empty = json::object();
    if (!root.contains(name)) {
      if (required) fail(name, "", "missing required section");
      return empty;
    }
    const json& s = root.at(name);
    if (!s.is_object()) fail(name, "", "section must be an object");
    return s;
  }

  void only_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.contains(k)) fail(section, k, "unknown key");
    }
  }

  double number(const json& obj, const std::string& section, const std::string& key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(section, key, "expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const json& obj, const std::string& section, const std::string& key) const {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, section, key, 0.0);
  }

  long long integer(const json& obj, const std::string& section, const std::string& key, long long fallback,
                    long long min_value) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(section, key, "expected an integer");
    const auto x = v.get<long long>();
    if (x < min_value) fail(section, key, "must be at least " + std::to_string(min_value));
    return x;
  }

  std::uint64_t seed(const json& v, const std::string& section, const std::string& key) const {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      fail(section, key, "seed must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const json& obj, const std::string& section, const std::string& key,
                     const std::string& fallback, bool required) const {
    if (!obj.contains(key)) {
      if (required) fail(section, key, "missing required key");
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) fail(section, key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::string& section, const std::string& key) const {
    const json& v = obj.at(key);
    if (!v.is_array()) fail(section, key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(section, key, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const std::string& text_;
  std::string source_;
};

models::ModelSpec parse_model(const Reader& r, const json& s) {
  r.only_keys(s, "model", {"id", "mass", "hbar", "omega", "reference", "discretization"});
  const std::string id = r.string(s, "model", "id", "", true);
  models::ModelSpec spec;
  try {
    spec = models::default_spec(models::model_from_string(id));
  } catch (const ValidationError&) {
    r.fail("model", "id", "unknown model '" + id + "'");
  }
  spec.mass = r.number(s, "model", "mass", spec.mass);
  spec.hbar = r.number(s, "model", "hbar", spec.hbar);
  spec.omega = r.number(s, "model", "omega", spec.omega);
  const auto labels = models::parameter_labels(spec.id);

  if (s.contains("reference")) {
    const json& ref = s.at("reference");
    if (!ref.is_object()) r.fail("model", "reference", "expected an object of parameter values");
    for (const auto& [k, v] : ref.items()) {
      const auto it = std::find(labels.begin(), labels.end(), k);
      if (it == labels.end()) r.fail("model", k, "not a parameter of " + id);
      if (!v.is_number()) r.fail("model", k, "expected a number");
      spec.reference[it - labels.begin()] = v.get<double>();
    }
  }

  if (s.contains("discretization")) {
    const json& d = s.at("discretization");
    if (!d.is_object()) r.fail("model", "discretization", "expected an object");
    std::visit(
        [&](auto& disc) {
          using T = std::decay_t<decltype(disc)>;
          if constexpr (std::is_same_v<T, models::GridDiscretization>) {
            r.only_keys(d, "model", {"half_width", "points"});
            disc.half_width = r.number(d, "model", "half_width", disc.half_width);
            disc.points = static_cast<int>(r.integer(d, "model", "points", disc.points, 1));
          } else if constexpr (std::is_same_v<T, models::FockDiscretization>) {
            r.only_keys(d, "model", {"n_max"});
            disc.n_max = static_cast<int>(r.integer(d, "model", "n_max", disc.n_max, 1));
          } else if constexpr (std::is_same_v<T, models::LatticeDiscretization>) {
            r.only_keys(d, "model", {"sites", "n_max"});
            disc.sites = static_cast<int>(r.integer(d, "model", "sites", disc.sites, 1));
            disc.n_max = static_cast<int>(r.integer(d, "model", "n_max", disc.n_max, 1));
          } else {
            r.only_keys(d, "model", {});
          }
        },
        spec.discretization);
  }
  try {
    models::validate(spec);
  } catch (const Error& e) {
    r.fail("model", "", e.what());
  }
  return spec;
}

models::StateKind parse_state(const Reader& r, const json& s, const models::ModelSpec& spec) {
  r.only_keys(s, "state", {"kind", "alpha", "mean", "cov"});
  const bool qubit = !models::has_classical_counterpart(spec.id);
  const std::string kind = r.string(s, "state", "kind", qubit ? "plus" : "ground", false);
  if (kind == "ground") return models::StateKind::ground();
  if (kind == "plus") return models::StateKind::plus();
  if (kind == "coherent") {
    if (!s.contains("alpha")) r.fail("state", "alpha", "coherent state needs alpha");
    const json& a = s.at("alpha");
    if (a.is_number()) return models::StateKind::coherent({a.get<double>(), 0.0});
    const auto v = r.numbers(s, "state", "alpha");
    if (v.size() != 2) r.fail("state", "alpha", "expected a number or [re, im]");
    return models::StateKind::coherent({v[0], v[1]});
  }
  if (kind == "gaussian") {
    if (!s.contains("mean")) r.fail("state", "mean", "Gaussian state needs a mean");
    if (!s.contains("cov")) r.fail("state", "cov", "Gaussian state needs a covariance");
    const auto mean = r.numbers(s, "state", "mean");
    const json& c = s.at("cov");
    if (!c.is_array() || c.size() != mean.size()) r.fail("state", "cov", "covariance must be a square array");
    RealMatrix cov(static_cast<Eigen::Index>(mean.size()), static_cast<Eigen::Index>(mean.size()));
    for (std::size_t i = 0; i < mean.size(); ++i) {
      if (!c[i].is_array() || c[i].size() != mean.size()) r.fail("state", "cov", "covariance must be a square array");
      for (std::size_t j = 0; j < mean.size(); ++j) {
        if (!c[i][j].is_number()) r.fail("state", "cov", "expected numbers");
        cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i][j].get<double>();
      }
    }
    return models::StateKind::gaussian(Eigen::Map<const RealVector>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                                       cov);
  }
  r.fail("state", "kind", "unknown state kind '" + kind + "'");
}

}  // namespace

ConfigError::ConfigError(std::string section, std::string key, int line, const std::string& message)
    : std::runtime_error(message), section_(std::move(section)), key_(std::move(key)), line_(line) {}

RunConfig parse_config(const std::string& text, const std::string& source_name,
                       std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("", "", line, source_name + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const Reader r(text, source_name);
  if (!root.is_object()) r.fail("", "", "top level must be an object");
  r.only_keys(root, "", {"model", "state", "parameters", "evolution", "method", "output"});

  RunConfig cfg;
  cfg.model = parse_model(r, r.section(root, "model", true));
  const auto labels = models::parameter_labels(cfg.model.id);
  cfg.state = parse_state(r, r.section(root, "state", false), cfg.model);

  const json& params = r.section(root, "parameters", false);
  r.only_keys(params, "parameters", {"values", "target", "sweep"});
  cfg.lambda = cfg.model.reference;
  if (params.contains("values")) {
    const json& v = params.at("values");
    if (!v.is_object()) r.fail("parameters", "values", "expected an object of parameter values");
    for (const auto& [k, x] : v.items()) {
      const auto it = std::find(labels.begin(), labels.end(), k);
      if (it == labels.end()) r.fail("parameters", k, "not a parameter of " + std::string(models::to_string(cfg.model.id)));
      if (!x.is_number()) r.fail("parameters", k, "expected a number");
      cfg.lambda[it - labels.begin()] = x.get<double>();
    }
  }
  cfg.target_label = r.string(params, "parameters", "target", labels.front(), false);
  if (cfg.target_label == "all") {
    cfg.all_parameters = true;
  } else {
    const auto it = std::find(labels.begin(), labels.end(), cfg.target_label);
    if (it == labels.end()) r.fail("parameters", "target", "unknown parameter '" + cfg.target_label + "'");
    cfg.target = static_cast<std::size_t>(it - labels.begin());
  }
  if (params.contains("sweep")) {
    const json& sw = params.at("sweep");
    if (!sw.is_object()) r.fail("parameters", "sweep", "expected an object");
    r.only_keys(sw, "parameters", {"parameter", "values"});
    cfg.sweep_parameter = r.string(sw, "parameters", "parameter", cfg.target_label, false);
    if (std::find(labels.begin(), labels.end(), cfg.sweep_parameter) == labels.end()) {
      r.fail("parameters", "parameter", "unknown sweep parameter '" + cfg.sweep_parameter + "'");
    }
    if (!sw.contains("values")) r.fail("parameters", "values", "sweep needs values");
    cfg.sweep_values = r.numbers(sw, "parameters", "values");
    if (cfg.sweep_values.empty()) r.fail("parameters", "values", "sweep grid is empty");
  }

  const json& evo = r.section(root, "evolution", true);
  r.only_keys(evo, "evolution", {"t", "times"});
  if (evo.contains("t") == evo.contains("times")) r.fail("evolution", "", "give exactly one of t or times");
  if (evo.contains("t")) {
    cfg.times = {r.number(evo, "evolution", "t", 0.0)};
  } else {
    cfg.times = r.numbers(evo, "evolution", "times");
    if (cfg.times.empty()) r.fail("evolution", "times", "time grid is empty");
  }
  for (double t : cfg.times) {
    if (!(t >= 0.0)) r.fail("evolution", evo.contains("t") ? "t" : "times", "times must be non-negative");
  }

  const json& m = r.section(root, "method", true);
  r.only_keys(m, "method",
              {"route", "dlambda", "quad_order", "n_slices", "n_samples", "dt", "seed", "seeds", "bootstrap",
               "drop_failed"});
  const std::string route = r.string(m, "method", "route", "", true);
  try {
    cfg.method.route = method_from_string(route);
  } catch (const ValidationError&) {
    r.fail("method", "route", "unknown route '" + route + "'");
  }
  cfg.method.dlambda = r.optional_number(m, "method", "dlambda");
  if (cfg.method.dlambda && !(*cfg.method.dlambda > 0.0)) r.fail("method", "dlambda", "must be positive");
  cfg.method.quad_order = static_cast<int>(r.integer(m, "method", "quad_order", cfg.method.quad_order, 1));
  cfg.method.n_slices = static_cast<int>(r.integer(m, "method", "n_slices", cfg.method.n_slices, 2));
  cfg.method.n_samples = static_cast<std::size_t>(r.integer(m, "method", "n_samples", 10000, 100));
  cfg.method.dt = r.optional_number(m, "method", "dt");
  if (cfg.method.dt && !(*cfg.method.dt > 0.0)) r.fail("method", "dt", "must be positive");
  if (m.contains("seed")) cfg.method.seed = r.seed(m.at("seed"), "method", "seed");
  if (seed_override) cfg.method.seed = seed_override;
  if (m.contains("seeds")) {
    const json& s = m.at("seeds");
    if (!s.is_array() || s.empty()) r.fail("method", "seeds", "expected a non-empty array of seeds");
    for (const auto& x : s) cfg.method.seeds.push_back(r.seed(x, "method", "seeds"));
  }
  cfg.method.bootstrap = static_cast<int>(r.integer(m, "method", "bootstrap", cfg.method.bootstrap, 2));
  if (m.contains("drop_failed")) {
    if (!m.at("drop_failed").is_boolean()) r.fail("method", "drop_failed", "expected a boolean");
    cfg.method.drop_failed = m.at("drop_failed").get<bool>();
  }
  if (cfg.all_parameters && cfg.method.route != QfiMethod::generator_variance &&
      cfg.method.route != QfiMethod::semiclassical_mc) {
    r.fail("parameters", "target", "target 'all' needs route generator_variance or semiclassical_mc");
  }
  if (cfg.method.route == QfiMethod::semiclassical_mc) {
    if (!models::has_classical_counterpart(cfg.model.id)) r.fail("method", "route", "model has no classical counterpart");
    if (!cfg.method.seed && cfg.method.seeds.empty()) r.fail("method", "seed", "stochastic route requires a seed");
  }

  const json& out = r.section(root, "output", false);
  r.only_keys(out, "output", {"path", "format"});
  cfg.output.path = r.string(out, "output", "path", "", false);
  cfg.output.format = r.string(out, "output", "format", cfg.sweep_values.size() || cfg.times.size() > 1 ? "csv" : "jsonl", false);
  if (cfg.output.format != "jsonl" && cfg.output.format != "csv") r.fail("output", "format", "expected jsonl or csv");
  return cfg;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "", 0, path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path, seed_override);
}

}  // namespace qfi::io
