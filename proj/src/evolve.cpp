#include "diraclab/evolve.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "diraclab/errors.hpp"

namespace diraclab {

namespace {
constexpr cplx I{0.0, 1.0};
constexpr double boundary_threshold = 1.0e-14;
} // namespace

std::string_view to_string(SubstepOrder o) { return o == SubstepOrder::strang ? "strang" : "lie"; }

std::string_view to_string(NonlinearIntegrator n)
{
    return n == NonlinearIntegrator::exact_preset ? "exact_preset" : "rk4";
}

SubstepOrder parse_substep_order(std::string_view s)
{
    if (s == "strang") return SubstepOrder::strang;
    if (s == "lie") return SubstepOrder::lie;
    throw configuration_error(fmt::format("unknown substep order '{}' (expected strang or lie)", s));
}

NonlinearIntegrator parse_nonlinear_integrator(std::string_view s)
{
    if (s == "exact_preset") return NonlinearIntegrator::exact_preset;
    if (s == "rk4") return NonlinearIntegrator::rk4;
    throw configuration_error(fmt::format("unknown nonlinear integrator '{}' (expected exact_preset or rk4)", s));
}

std::size_t step_count(const Grid &grid, double t_final)
{
    if (!std::isfinite(t_final) || t_final < 0.0) {
        throw configuration_error(fmt::format("t_final must be finite and >= 0, got {}", t_final));
    }
    const double ratio = t_final / grid.dx();
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1.0e-9 * std::max(1.0, ratio)) {
        throw configuration_error(
            fmt::format("t_final = {} is not an integer multiple of dt = dx = {}", t_final, grid.dx()));
    }
    return static_cast<std::size_t>(n);
}

void validate_scheme(const ModelParams &params, const SchemeConfig &scheme)
{
    if (scheme.nonlinear_integrator == NonlinearIntegrator::exact_preset && params.preset == Preset::custom) {
        throw configuration_error("exact_preset nonlinear integrator requires a thirring or gross_neveu model");
    }
    if (scheme.diagnostics_stride == 0) {
        throw configuration_error("diagnostics_stride must be positive");
    }
}

// ---------------------------------------------------------------------------

void transport_shift_in_place(SpinorField &field, Direction dir, std::size_t step)
{
    auto hot = [](const cplx &z) { return std::abs(z) >= boundary_threshold; };
    if (hot(field.u.front()) || hot(field.u.back()) || hot(field.v.front()) || hot(field.v.back())) {
        throw light_cone_overflow(
            fmt::format("field reached the domain boundary at step {} (t = {}); enlarge [x_min, x_max]", step,
                        field.t),
            step);
    }
    if (dir == Direction::forward) {
        std::rotate(field.u.rbegin(), field.u.rbegin() + 1, field.u.rend());
        field.u.front() = 0.0;
        std::rotate(field.v.begin(), field.v.begin() + 1, field.v.end());
        field.v.back() = 0.0;
    } else {
        std::rotate(field.u.begin(), field.u.begin() + 1, field.u.end());
        field.u.back() = 0.0;
        std::rotate(field.v.rbegin(), field.v.rbegin() + 1, field.v.rend());
        field.v.front() = 0.0;
    }
}

SpinorField transport_shift(const SpinorField &field, Direction dir)
{
    SpinorField out = field;
    transport_shift_in_place(out, dir);
    out.t += dir == Direction::forward ? field.grid.dx() : -field.grid.dx();
    return out;
}

void mass_rotation_in_place(SpinorField &field, double mass, double dt)
{
    if (mass == 0.0 || dt == 0.0) return;
    const double c = std::cos(mass * dt);
    const double s = std::sin(mass * dt);
    for (std::size_t j = 0; j < field.size(); ++j) {
        const cplx u = field.u[j];
        const cplx v = field.v[j];
        field.u[j] = u * c + I * v * s;
        field.v[j] = v * c + I * u * s;
    }
}

SpinorField mass_rotation(const SpinorField &field, double mass, double dt)
{
    SpinorField out = field;
    mass_rotation_in_place(out, mass, dt);
    return out;
}

std::pair<cplx, cplx> exact_nonlinear_flow(const ModelParams &params, cplx u, cplx v, double dt)
{
    const double a = params.coupling;
    switch (params.preset) {
        case Preset::thirring:
            // |u| and |v| are constants of this flow.
            return {u * std::polar(1.0, -a * std::norm(v) * dt), v * std::polar(1.0, -a * std::norm(u) * dt)};
        case Preset::gross_neveu: {
            // rho = conj(u) v + u conj(v) is a constant of this flow, leaving a linear rotation.
            const double rho = 2.0 * (std::conj(u) * v).real();
            const double th = 2.0 * a * rho * dt;
            const double c = std::cos(th), s = std::sin(th);
            return {u * c - I * v * s, v * c - I * u * s};
        }
        case Preset::custom:
            break;
    }
    throw configuration_error("exact nonlinear flow is only available for the thirring and gross_neveu presets");
}

std::pair<cplx, cplx> rk4_nonlinear_flow(const ModelParams &params, cplx u, cplx v, double dt)
{
    auto f = [&](cplx a, cplx b) {
        const auto [n1, n2] = eval_N(params, a, b);
        return std::pair<cplx, cplx>{-I * n1, -I * n2};
    };
    const auto [k1u, k1v] = f(u, v);
    const auto [k2u, k2v] = f(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
    const auto [k3u, k3v] = f(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
    const auto [k4u, k4v] = f(u + dt * k3u, v + dt * k3v);
    return {u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u), v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

void nonlinear_substep_in_place(SpinorField &field, const ModelParams &params, double dt,
                                NonlinearIntegrator integrator)
{
    if (integrator == NonlinearIntegrator::exact_preset && params.preset == Preset::custom) {
        throw configuration_error("exact_preset nonlinear integrator requires a thirring or gross_neveu model");
    }
    if (dt == 0.0) return;
    if (params.preset != Preset::custom && params.coupling == 0.0) return;
    for (std::size_t j = 0; j < field.size(); ++j) {
        const auto [u, v] = integrator == NonlinearIntegrator::exact_preset
                                ? exact_nonlinear_flow(params, field.u[j], field.v[j], dt)
                                : rk4_nonlinear_flow(params, field.u[j], field.v[j], dt);
        field.u[j] = u;
        field.v[j] = v;
    }
}

SpinorField nonlinear_substep(const SpinorField &field, const ModelParams &params, double dt,
                              NonlinearIntegrator integrator)
{
    SpinorField out = field;
    nonlinear_substep_in_place(out, params, dt, integrator);
    return out;
}

void step_in_place(SpinorField &field, const ModelParams &params, const SchemeConfig &scheme, Direction dir,
                   std::size_t step_index)
{
    const double dt = field.grid.dx();
    const double sgn = dir == Direction::forward ? 1.0 : -1.0;
    const auto nl = scheme.nonlinear_integrator;
    const double m = params.mass;

    if (scheme.substep_order == SubstepOrder::strang) {
        const double h = 0.5 * sgn * dt;
        mass_rotation_in_place(field, m, h);
        nonlinear_substep_in_place(field, params, h, nl);
        transport_shift_in_place(field, dir, step_index);
        nonlinear_substep_in_place(field, params, h, nl);
        mass_rotation_in_place(field, m, h);
    } else if (dir == Direction::forward) {
        mass_rotation_in_place(field, m, dt);
        nonlinear_substep_in_place(field, params, dt, nl);
        transport_shift_in_place(field, dir, step_index);
    } else {
        transport_shift_in_place(field, dir, step_index);
        nonlinear_substep_in_place(field, params, -dt, nl);
        mass_rotation_in_place(field, m, -dt);
    }
    field.t += sgn * dt;

    if (!field.all_finite()) {
        throw non_finite_field(fmt::format("non-finite field value after step {} (t = {})", step_index, field.t),
                               step_index);
    }
}

SpinorField step(const SpinorField &field, const ModelParams &params, const SchemeConfig &scheme, Direction dir)
{
    SpinorField out = field;
    step_in_place(out, params, scheme, dir);
    return out;
}

Trajectory run_trajectory(const SpinorField &init, const ModelParams &params, const SchemeConfig &scheme,
                          const ModelConstants &constants, const TrajectoryOptions &options)
{
    validate_scheme(params, scheme);
    if (init.u.size() != init.grid.n_cells() || init.v.size() != init.grid.n_cells()) {
        throw configuration_error("initial field size does not match its grid");
    }
    if (!init.all_finite()) {
        throw non_finite_field("initial field contains non-finite values", 0);
    }

    Trajectory traj;
    traj.params = params;
    traj.constants = constants;
    traj.scheme = scheme;
    traj.steps = step_count(init.grid, scheme.t_final);
    traj.dt = init.grid.dx();

    SpinorField field = init;
    NullLineIntegrals lines(init.grid);
    RecordBuilder builder(params.mass, constants.c, init);

    auto emit = [&](std::size_t n) {
        traj.records.push_back(builder.make(field, lines));
        if (options.keep_snapshots) {
            traj.snapshots.push_back({n, field, lines.gamma_r(), lines.gamma_l()});
        }
    };

    emit(0);
    SpinorField before;
    for (std::size_t n = 1; n <= traj.steps; ++n) {
        before = field;
        step_in_place(field, params, scheme, Direction::forward, n);
        lines.advance(before, field);
        if (n % scheme.diagnostics_stride == 0 || n == traj.steps) emit(n);
    }
    return traj;
}

} // namespace diraclab
