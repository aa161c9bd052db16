#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "diraclab/field.hpp"
#include "diraclab/functionals.hpp"
#include "diraclab/model.hpp"

namespace diraclab {

enum class SubstepOrder { strang, lie };
enum class NonlinearIntegrator { exact_preset, rk4 };

std::string_view to_string(SubstepOrder o);
std::string_view to_string(NonlinearIntegrator n);
SubstepOrder parse_substep_order(std::string_view s);
NonlinearIntegrator parse_nonlinear_integrator(std::string_view s);

/// The time step is always the cell width (CFL = 1); it is never configured directly.
struct SchemeConfig {
    double t_final = 1.0;
    SubstepOrder substep_order = SubstepOrder::strang;
    NonlinearIntegrator nonlinear_integrator = NonlinearIntegrator::exact_preset;
    std::size_t diagnostics_stride = 10;
};

/// Number of dt = dx steps to reach t_final; configuration_error unless t_final is a
/// non-negative integer multiple of dx.
std::size_t step_count(const Grid &grid, double t_final);

enum class Direction { forward, backward };

/// Exact solution of the free-streaming part over one step: u moves one cell right,
/// v one cell left, zeros enter at the inflow ends. Backward undoes it.
/// Throws light_cone_overflow when a boundary cell carries |u| or |v| >= 1e-14.
SpinorField transport_shift(const SpinorField &field, Direction dir = Direction::forward);
void transport_shift_in_place(SpinorField &field, Direction dir = Direction::forward, std::size_t step = 0);

/// Pointwise rotation solving i u_t = -m v, i v_t = -m u exactly over dt.
SpinorField mass_rotation(const SpinorField &field, double mass, double dt);
void mass_rotation_in_place(SpinorField &field, double mass, double dt);

/// Pointwise flow of i u_t = N1(u,v), i v_t = N2(u,v) over dt.
SpinorField nonlinear_substep(const SpinorField &field, const ModelParams &params, double dt,
                              NonlinearIntegrator integrator = NonlinearIntegrator::exact_preset);
void nonlinear_substep_in_place(SpinorField &field, const ModelParams &params, double dt,
                                NonlinearIntegrator integrator);

/// Exact nonlinear flow at one point (presets only).
std::pair<cplx, cplx> exact_nonlinear_flow(const ModelParams &params, cplx u, cplx v, double dt);
/// One classical RK4 step of the pointwise nonlinear ODE.
std::pair<cplx, cplx> rk4_nonlinear_flow(const ModelParams &params, cplx u, cplx v, double dt);

/// One step of size dx. Strang: [mass, nonlinear](dt/2), shift, [nonlinear, mass](dt/2).
/// Lie: [mass, nonlinear](dt), shift. Backward applies the exact inverse composition
/// of the Strang step (rotations with -dt, reversed shift).
SpinorField step(const SpinorField &field, const ModelParams &params, const SchemeConfig &scheme,
                 Direction dir = Direction::forward);
void step_in_place(SpinorField &field, const ModelParams &params, const SchemeConfig &scheme,
                   Direction dir = Direction::forward, std::size_t step_index = 0);

struct Snapshot {
    std::size_t step = 0;
    SpinorField field;
    std::vector<double> gamma_r;
    std::vector<double> gamma_l;
};

struct Trajectory {
    ModelParams params;
    ModelConstants constants;
    SchemeConfig scheme;
    std::size_t steps = 0;
    double dt = 0.0;
    std::vector<Snapshot> snapshots;
    std::vector<FunctionalRecord> records;
};

struct TrajectoryOptions {
    bool keep_snapshots = true;
};

/// Evolves `init` to scheme.t_final, emitting a snapshot and a FunctionalRecord every
/// diagnostics_stride steps and at the final step. Aborts with non_finite_field or
/// light_cone_overflow carrying the offending step index.
Trajectory run_trajectory(const SpinorField &init, const ModelParams &params, const SchemeConfig &scheme,
                          const ModelConstants &constants, const TrajectoryOptions &options = {});

/// Validates the scheme against the model: exact_preset needs a preset nonlinearity.
void validate_scheme(const ModelParams &params, const SchemeConfig &scheme);

} // namespace diraclab
