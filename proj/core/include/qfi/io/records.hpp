#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfi/estimate.hpp"

namespace qfi::io {

inline constexpr int kSchemaVersion = 1;

/// One persisted result line.
struct ResultRecord {
  int schema_version = kSchemaVersion;
  std::string method;
  std::string model;
  std::string target;
  std::vector<double> lambda;
  double t = 0.0;
  std::optional<double> qfi;
  std::optional<std::vector<std::vector<double>>> qfim;
  std::optional<double> std_error;
  std::optional<std::vector<std::vector<double>>> qfim_std_error;
  std::optional<std::size_t> n_samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::string discretization;
  double runtime_ms = 0.0;
  std::vector<std::string> warnings;

  bool operator==(const ResultRecord&) const = default;
};

ResultRecord to_record(const QfiEstimate& estimate, const std::string& target);
ResultRecord to_record(const QfimEstimate& estimate);

nlohmann::json to_json(const ResultRecord& record);
/// Throws ValidationError on missing keys or wrong types.
ResultRecord record_from_json(const nlohmann::json& j);

std::string serialize(const ResultRecord& record);
ResultRecord parse_record(const std::string& line);

/// Appends one JSON line.
void append_jsonl(const std::string& path, const ResultRecord& record);

struct SweepRow {
  double t = 0.0;
  double lambda = 0.0;
  std::string method;
  std::optional<double> qfi;
  std::optional<double> std_error;
  std::string error;
};

inline constexpr const char* kSweepHeader = "t,lambda,method,qfi,stderr,error";

std::string sweep_csv(const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace qfi::io
