#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <vector>

namespace annmoc::app {

enum class ExitCode : int {
    ok = 0,
    solver_failure = 1,
    config_error = 2,
    not_converged = 3,
    io_error = 4,
};

/// Solves the configured problem and writes the enabled artifacts to
/// config.out: flux.csv, history.csv, timing.csv, summary.txt and, for the
/// network estimator, surrogate.mlp. Nothing is written when the
/// configuration is rejected. Progress goes to `log`.
ExitCode run(RunConfig config, std::ostream& log);

/// Solves the same problem with each estimator kind and the same seed and
/// writes compare.csv (kind, converged, iterations, final_metric, l2_error,
/// max_error, seconds) and summary.txt. Needs at least two kinds.
ExitCode compare(RunConfig config, const std::vector<EstimatorKind>& kinds, std::ostream& log);

/// Writes the mesh reference flux of a problem2 family member on the
/// evaluation grid (x, psi_reference) plus summary.txt.
ExitCode oracle(RunConfig config, std::ostream& log);

}  // namespace annmoc::app
