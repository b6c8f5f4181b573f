#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qfi/estimate.hpp"
#include "qfi/io/config.hpp"
#include "qfi/io/records.hpp"

namespace qfi::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kNotConverged = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

/// One estimate at time t and parameter point lambda.
std::variant<QfiEstimate, QfimEstimate> estimate(const io::RunConfig& config, double t, const Params& lambda,
                                                 std::optional<std::uint64_t> seed, int threads);

io::ResultRecord run_single(const io::RunConfig& config, const Overrides& overrides);

/// Rows over the time grid, the parameter sweep and the seed list.
/// Per-point failures fill the error column.
std::vector<io::SweepRow> run_sweep(const io::RunConfig& config, const Overrides& overrides);

/// Maps a library exception to an exit status and writes the diagnostic.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace qfi::cli
