#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "diraclab/evolve.hpp"
#include "diraclab/functionals.hpp"
#include "diraclab/verdict.hpp"

namespace diraclab {

// ---------------------------------------------------------------------------
// Two-solution runs
// ---------------------------------------------------------------------------

struct PairExperiment {
    SpinorField base_init;
    SpinorField perturbed_init;
    ModelParams params;
    SchemeConfig scheme;
    ModelConstants constants;
};

struct PairResult {
    std::vector<PairRecord> records;
    std::vector<FunctionalRecord> base_records;
    std::vector<FunctionalRecord> perturbed_records;
    StabilityCheck checks;
    double L0_base = 0.0;
    double L0_perturbed = 0.0;
};

/// Evolves both solutions in lockstep and emits a PairRecord every diagnostics_stride
/// steps (and at the final step). A numerical abort in either member aborts the run; the
/// rethrown error names the member.
PairResult pair_run(const PairExperiment &exp);

/// CSV: t,L1,Q1,D1,int_D1,lyapunov,h3,h3_closed,h4,bound_residual
void write_pair_csv(std::ostream &os, std::span<const PairRecord> records);

// ---------------------------------------------------------------------------
// Cauchy sequences
// ---------------------------------------------------------------------------

struct CauchyExperiment {
    std::vector<SpinorField> members;
    SpinorField limit;
    ModelParams params;
    SchemeConfig scheme;
    ModelConstants constants;
    /// Lockstep evaluation (true) or post hoc from stored snapshots (false). Same numbers.
    bool streaming = false;
    /// When set, consecutive limit distances must shrink by this factor within +-10%.
    std::optional<double> expected_ratio;
};

struct DistanceEntry {
    std::size_t k = 0;
    std::size_t j = 0;
    double t_sup = 0.0;
    double d_initial = 0.0;
    double d_sup = 0.0;
    double bound = 0.0;
    Status verdict = Status::not_applicable;
};

struct CauchyResult {
    /// Index members.size() denotes the limit field.
    std::vector<DistanceEntry> entries;
    /// sup-t distance from member k to the limit.
    std::vector<double> limit_distances;
    /// limit_distances[k] / limit_distances[k+1]
    std::vector<double> ratios;
    Verdict pair_bounds;
    Verdict monotone;
    Verdict ratio_window;
    Verdict triangle;
    std::size_t stride = 0;
    /// Limit trajectory with snapshots (post hoc mode only).
    std::optional<Trajectory> limit_trajectory;

    /// Symmetric (n+1) x (n+1) sup-distance lookup.
    double distance(std::size_t k, std::size_t j) const;
};

CauchyResult cauchy_experiment(const CauchyExperiment &exp);

/// CSV: k,j,t_sup,d_initial,d_sup,bound,verdict
void write_distance_csv(std::ostream &os, const CauchyResult &result);

// ---------------------------------------------------------------------------
// Weak form
// ---------------------------------------------------------------------------

/// phi(t,x) = b((x - x_center)/x_halfwidth) b((t - t_center)/t_halfwidth),
/// b(s) = exp(1 - 1/(1 - s^2)) on |s| < 1.
struct TestFunctionSpec {
    double x_center = 0.0;
    double x_halfwidth = 1.0;
    double t_center = 1.0;
    double t_halfwidth = 0.5;
};

struct WeakResidual {
    cplx first;  ///< int int u (phi_t + phi_x) + (i m v - i N1) phi
    cplx second; ///< int int v (phi_t - phi_x) + (i m u - i N2) phi
    double norm = 0.0; ///< |first| + |second|
};

/// Midpoint rule in x, trapezoid over the stored snapshots in t. The test support must lie
/// strictly inside the space-time box covered by the trajectory (domain_too_small).
WeakResidual weak_residual(const Trajectory &trajectory, const TestFunctionSpec &phi);

} // namespace diraclab
