#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "edsr/config.hpp"
#include "edsr/results_io.hpp"

namespace edsr {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Runs the configured experiment and returns its table. Progress lines go
/// to `log` when it is non-null.
ResultTable run_experiment(const RunConfig& cfg, std::ostream* log = nullptr);

/// Command-line entry: --config PATH (required), --seed N, --threads N,
/// --output PATH, --verbose. Results go to --output, the config's output
/// path, or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edsr
