#include "qfi/io/records.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi::io {
namespace {

using nlohmann::json;
using Table = std::vector<std::vector<double>>;

Table to_table(const RealMatrix& m) {
  Table out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  }
  return out;
}

void fill_common(ResultRecord& r, const EstimateMetadata& md, QfiMethod method) {
  r.method = std::string(to_string(method));
  r.model = md.model;
  r.lambda = md.lambda;
  r.t = md.t;
  r.n_samples = md.n_samples;
  r.seed = md.seed;
  r.dt = md.dt;
  r.discretization = md.discretization;
  r.runtime_ms = md.runtime_ms;
  r.warnings = md.warnings;
  if (md.clamped) r.warnings.push_back("negative round-off clamped to zero");
  if (md.discretization_error) {
    std::ostringstream s;
    s << std::setprecision(6) << "discretization error estimate " << *md.discretization_error;
    r.warnings.push_back(s.str());
  }
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const json& need(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("record is missing key '") + key + "'");
  return j.at(key);
}

template <typename T>
std::optional<T> read_opt(const json& j, const char* key) {
  const json& v = need(j, key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << *v;
  return s.str();
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

ResultRecord to_record(const QfiEstimate& estimate, const std::string& target) {
  ResultRecord r;
  fill_common(r, estimate.metadata, estimate.method);
  r.target = target;
  r.qfi = estimate.value;
  r.std_error = estimate.std_error;
  return r;
}

ResultRecord to_record(const QfimEstimate& estimate) {
  ResultRecord r;
  fill_common(r, estimate.metadata, estimate.method);
  r.target = "all";
  r.qfim = to_table(estimate.value);
  if (estimate.std_error) r.qfim_std_error = to_table(*estimate.std_error);
  return r;
}

json to_json(const ResultRecord& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["method"] = r.method;
  j["model"] = r.model;
  j["target"] = r.target;
  j["lambda"] = r.lambda;
  j["t"] = r.t;
  j["qfi"] = opt(r.qfi);
  j["qfim"] = opt(r.qfim);
  j["stderr"] = r.qfim_std_error ? json(*r.qfim_std_error) : opt(r.std_error);
  j["n_samples"] = opt(r.n_samples);
  j["seed"] = opt(r.seed);
  j["dt"] = opt(r.dt);
  j["discretization"] = r.discretization;
  j["runtime_ms"] = r.runtime_ms;
  j["warnings"] = r.warnings;
  return j;
}

ResultRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  try {
    ResultRecord r;
    r.schema_version = need(j, "schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) {
      throw ValidationError("unsupported schema_version " + std::to_string(r.schema_version));
    }
    r.method = need(j, "method").get<std::string>();
    r.model = need(j, "model").get<std::string>();
    r.target = j.contains("target") ? j.at("target").get<std::string>() : std::string();
    r.lambda = need(j, "lambda").get<std::vector<double>>();
    r.t = need(j, "t").get<double>();
    r.qfi = read_opt<double>(j, "qfi");
    r.qfim = read_opt<Table>(j, "qfim");
    const json& se = need(j, "stderr");
    if (se.is_array()) {
      r.qfim_std_error = se.get<Table>();
    } else if (!se.is_null()) {
      r.std_error = se.get<double>();
    }
    r.n_samples = read_opt<std::size_t>(j, "n_samples");
    r.seed = read_opt<std::uint64_t>(j, "seed");
    r.dt = read_opt<double>(j, "dt");
    r.discretization = need(j, "discretization").get<std::string>();
    r.runtime_ms = need(j, "runtime_ms").get<double>();
    r.warnings = need(j, "warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed record: ") + e.what());
  }
}

std::string serialize(const ResultRecord& record) { return to_json(record).dump(); }

ResultRecord parse_record(const std::string& line) {
  try {
    return record_from_json(json::parse(line));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed record: ") + e.what());
  }
}

void append_jsonl(const std::string& path, const ResultRecord& record) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw ResourceError("cannot open " + path + " for appending");
  out << serialize(record) << '\n';
  if (!out) throw ResourceError("failed writing " + path);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  s << kSweepHeader << '\n';
  for (const auto& row : rows) {
    s << csv_number(row.t) << ',' << csv_number(row.lambda) << ',' << csv_field(row.method) << ','
      << csv_number(row.qfi) << ',' << csv_number(row.std_error) << ',' << csv_field(row.error) << '\n';
  }
  return s.str();
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open " + path + " for writing");
  out << sweep_csv(rows);
  if (!out) throw ResourceError("failed writing " + path);
}

}  // namespace qfi::io
