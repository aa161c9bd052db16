#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "diraclab/evolve.hpp"
#include "diraclab/field.hpp"
#include "diraclab/model.hpp"

namespace diraclab {

/// Closed-form solution of the massless Thirring system. Moduli are rigid translates of
/// the initial moduli; phases integrate along characteristics:
///
///   u(t,x) = u0(x-t) exp(-i a int_0^t |v0(x-t+2s)|^2 ds)
///   v(t,x) = v0(x+t) exp(-i a int_0^t |u0(x+t-2s)|^2 ds)
///
/// Phase integrals use adaptive Gauss-Kronrod quadrature (tolerance 1e-12).
/// Throws configuration_error unless params is thirring with mass 0.
SpinorField thirring_m0_exact(std::span<const ProfileSpec> profiles, const ModelParams &params, double t,
                              const Grid &grid);

/// Independent reference for the closed form: integrates i u_s = a |v|^2 u along each
/// right-moving characteristic (and the mirror equation for v) with classical RK4 at step h.
SpinorField thirring_m0_characteristic_reference(std::span<const ProfileSpec> profiles, const ModelParams &params,
                                                 double t, const Grid &grid, double h = 1.0e-5);

/// Literal O(N^2) double sums; refuse grids above 4096 cells.
double brute_force_Q0(const SpinorField &field);
double brute_force_Q1(const SpinorField &a, const SpinorField &b);

/// sqrt(sum (|du|^2 + |dv|^2) dx) between two fields on the same grid.
double l2_distance(const SpinorField &a, const SpinorField &b);

/// Samples a fine field (2N cells) at the centres of the coarse grid (N cells) with
/// four-point cubic interpolation.
SpinorField restrict_to_coarse(const SpinorField &fine, const Grid &coarse);

struct RefinementProblem {
    ModelParams params;
    std::vector<ProfileSpec> profiles;
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t base_cells = 512;
    SchemeConfig scheme;
};

struct RefinementRow {
    std::size_t level = 0;
    std::size_t n_cells = 0;
    double l2_error = 0.0;
    double observed_order = 0.0; ///< NaN on the first row
};

struct RefinementResult {
    /// True when errors are measured against thirring_m0_exact; otherwise they are
    /// Richardson estimates from consecutive levels, ||u_l - u_{l+1}|| / (1 - 2^-2).
    bool against_oracle = false;
    std::vector<RefinementRow> rows;
};

/// Runs the problem at base_cells * 2^l, l = 0..levels-1 (levels >= 3).
RefinementResult refinement_study(const RefinementProblem &problem, std::size_t levels);

/// CSV: level,n_cells,l2_error,observed_order
void write_refinement_csv(std::ostream &os, const RefinementResult &result);

/// Evolves `init` over `steps` steps without diagnostics.
SpinorField evolve_steps(SpinorField init, const ModelParams &params, const SchemeConfig &scheme, std::size_t steps);

} // namespace diraclab
