#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "diraclab/config.hpp"
#include "diraclab/verdict.hpp"

namespace diraclab {

enum exit_code : int {
    exit_ok = 0,
    exit_verdict_failed = 2,
    exit_configuration = 3,
    exit_numerical_abort = 4,
};

struct DispatchResult {
    int exit_code = exit_ok;
    std::vector<Verdict> verdicts;
    /// Pretty-printed JSON, identical to summary.json on disk.
    std::string summary;
    /// Human-readable reason when the run ended early.
    std::string error;
};

/// Runs the configured experiment and writes its artifacts into `out_dir` (created if
/// needed). Errors are folded into the exit code; only filesystem failures escape.
DispatchResult dispatch(const RunConfig &config, const std::filesystem::path &out_dir);

/// Library version string.
std::string_view version();

} // namespace diraclab
