#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "diraclab/errors.hpp"
#include "diraclab/evolve.hpp"
#include "diraclab/field.hpp"
#include "diraclab/model.hpp"
#include "diraclab/stability.hpp"

namespace diraclab {

enum class Experiment { validate, run, pair, cauchy, oracle };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view s);

struct ConfigIssue {
    std::string key;
    int line = 0; ///< 0 when the problem is not tied to a line (missing key or block)
    std::string reason;
};

/// Raised by parse_config with every problem found, not just the first.
class config_errors : public configuration_error {
public:
    explicit config_errors(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue> &issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct PairSettings {
    double epsilon = 1.0e-3;
    std::vector<ProfileSpec> perturbation;
};

struct CauchySettings {
    std::size_t members = 6;
    double epsilon0 = 1.0e-2;
    double ratio = 0.5;
    bool streaming = false;
    std::vector<ProfileSpec> perturbation;
    bool weak_enabled = false;
    TestFunctionSpec weak;
};

struct OracleSettings {
    std::size_t levels = 4;
};

struct OutputSettings {
    std::string directory = "out";
    bool snapshots = false;
    std::size_t cones = 100;
};

/// Fully validated run configuration.
///
/// Text format: INI-style sections with `key = value` lines; `;` or `#` start comments.
/// Sections: [model], [model.custom], [scheme], [profile.<name>], [experiment], [pair],
/// [cauchy], [perturbation.<name>], [weak], [oracle], [output], [run].
struct RunConfig {
    Experiment experiment = Experiment::run;
    bool experiment_from_file = false;

    ModelParams model;
    ConstantsOptions constants;

    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t n_cells = 4096;
    SchemeConfig scheme;
    bool scheme_present = false;

    std::vector<ProfileSpec> profiles;

    PairSettings pair;
    CauchySettings cauchy;
    OracleSettings oracle;
    OutputSettings output;

    std::uint64_t seed = 0;

    /// Normalised section -> key -> value text, defaults filled in.
    std::vector<std::pair<std::string, std::string>> resolved;
    std::string source;

    Grid grid() const { return Grid(x_min, x_max, n_cells); }
};

/// Parses and validates configuration text. `experiment` (when non-empty) is the CLI
/// subcommand; a conflicting [experiment] kind in the file is an error.
RunConfig parse_config(std::string_view text, std::string_view experiment = {});

} // namespace diraclab
