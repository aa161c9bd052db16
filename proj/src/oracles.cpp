#include "diraclab/oracles.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "diraclab/errors.hpp"

namespace diraclab {

namespace {

constexpr std::size_t brute_force_limit = 4096;

void require_massless_thirring(const ModelParams &params)
{
    if (params.preset != Preset::thirring || params.mass != 0.0) {
        throw configuration_error("closed-form oracle needs the thirring preset with mass 0");
    }
}

/// Sum of the profiles on one component, evaluated in closed form.
cplx component_value(std::span<const ProfileSpec> profiles, Component c, double x)
{
    cplx z = 0.0;
    for (const auto &p : profiles) {
        if (p.component == c) z += evaluate_profile(p, x);
    }
    return z;
}

double phase_integral(std::span<const ProfileSpec> profiles, Component partner, double start, double sign, double t)
{
    if (t == 0.0) return 0.0;
    auto integrand = [&](double s) { return std::norm(component_value(profiles, partner, start + sign * 2.0 * s)); };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 20, 1.0e-12, &err);
}

} // namespace

SpinorField thirring_m0_exact(std::span<const ProfileSpec> profiles, const ModelParams &params, double t,
                              const Grid &grid)
{
    require_massless_thirring(params);
    const double a = params.coupling;
    SpinorField f(grid, t);
    for (std::size_t j = 0; j < grid.n_cells(); ++j) {
        const double x = grid.center(j);
        const cplx u0 = component_value(profiles, Component::u, x - t);
        const cplx v0 = component_value(profiles, Component::v, x + t);
        if (u0 != 0.0) {
            f.u[j] = u0 * std::polar(1.0, -a * phase_integral(profiles, Component::v, x - t, 1.0, t));
        }
        if (v0 != 0.0) {
            f.v[j] = v0 * std::polar(1.0, -a * phase_integral(profiles, Component::u, x + t, -1.0, t));
        }
    }
    return f;
}

SpinorField thirring_m0_characteristic_reference(std::span<const ProfileSpec> profiles, const ModelParams &params,
                                                 double t, const Grid &grid, double h)
{
    require_massless_thirring(params);
    const double a = params.coupling;
    constexpr cplx I{0.0, 1.0};
    const auto steps = static_cast<std::size_t>(std::ceil(t / h - 1.0e-9));
    const double hs = steps > 0 ? t / static_cast<double>(steps) : 0.0;

    // dw/ds = -i a |partner(s)|^2 w along the characteristic; partner modulus evaluated where
    // the characteristic sits at time s.
    auto integrate = [&](cplx w, auto &&partner_sq) {
        for (std::size_t n = 0; n < steps; ++n) {
            const double s = static_cast<double>(n) * hs;
            const double p0 = partner_sq(s), ph = partner_sq(s + 0.5 * hs), p1 = partner_sq(s + hs);
            const cplx k1 = -I * a * p0 * w;
            const cplx k2 = -I * a * ph * (w + 0.5 * hs * k1);
            const cplx k3 = -I * a * ph * (w + 0.5 * hs * k2);
            const cplx k4 = -I * a * p1 * (w + hs * k3);
            w += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return w;
    };

    SpinorField f(grid, t);
    for (std::size_t j = 0; j < grid.n_cells(); ++j) {
        const double x = grid.center(j);
        // u rides x(s) = x - t + s; v along its own characteristic reaches x(s) at time s
        // from y = x(s) + s, so |v(s, x(s))| = |v0(x - t + 2s)|.
        const cplx u0 = component_value(profiles, Component::u, x - t);
        if (std::abs(u0) > 0.0) {
            f.u[j] = integrate(u0, [&](double s) {
                return std::norm(component_value(profiles, Component::v, (x - t + s) + s));
            });
        }
        const cplx v0 = component_value(profiles, Component::v, x + t);
        if (std::abs(v0) > 0.0) {
            f.v[j] = integrate(v0, [&](double s) {
                return std::norm(component_value(profiles, Component::u, (x + t - s) - s));
            });
        }
    }
    return f;
}

double brute_force_Q0(const SpinorField &field)
{
    const std::size_t N = field.size();
    if (N > brute_force_limit) {
        throw configuration_error(fmt::format("brute_force_Q0 refuses {} cells (limit {})", N, brute_force_limit));
    }
    double q = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = j + 1; k < N; ++k) {
            q += std::norm(field.u[j]) * std::norm(field.v[k]);
        }
    }
    const double dx = field.grid.dx();
    return q * dx * dx;
}

double brute_force_Q1(const SpinorField &a, const SpinorField &b)
{
    const std::size_t N = a.size();
    if (N > brute_force_limit) {
        throw configuration_error(fmt::format("brute_force_Q1 refuses {} cells (limit {})", N, brute_force_limit));
    }
    if (!(a.grid == b.grid)) throw configuration_error("brute_force_Q1: grid mismatch");
    double q = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = j + 1; k < N; ++k) {
            const double Ux = std::norm(a.u[j] - b.u[j]);
            const double Vy = std::norm(a.v[k] - b.v[k]);
            q += Ux * (std::norm(a.v[k]) + std::norm(b.v[k])) + (std::norm(a.u[j]) + std::norm(b.u[j])) * Vy;
        }
    }
    const double dx = a.grid.dx();
    return q * dx * dx;
}

double l2_distance(const SpinorField &a, const SpinorField &b)
{
    if (!(a.grid == b.grid)) throw configuration_error("l2_distance: grid mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        s += std::norm(a.u[j] - b.u[j]) + std::norm(a.v[j] - b.v[j]);
    }
    return std::sqrt(s * a.grid.dx());
}

SpinorField restrict_to_coarse(const SpinorField &fine, const Grid &coarse)
{
    if (fine.grid.n_cells() != 2 * coarse.n_cells() || fine.grid.x_min() != coarse.x_min()
        || fine.grid.x_max() != coarse.x_max()) {
        throw configuration_error("restrict_to_coarse expects a fine grid with exactly twice the cells");
    }
    SpinorField out(coarse, fine.t);
    const std::size_t Nf = fine.size();
    auto sample = [&](const std::vector<cplx> &w, std::size_t j) {
        const std::size_t i = 2 * j;
        if (i == 0 || i + 2 >= Nf) return 0.5 * (w[i] + w[i + 1]);
        return (-w[i - 1] + 9.0 * w[i] + 9.0 * w[i + 1] - w[i + 2]) / 16.0;
    };
    for (std::size_t j = 0; j < coarse.n_cells(); ++j) {
        out.u[j] = sample(fine.u, j);
        out.v[j] = sample(fine.v, j);
    }
    return out;
}

SpinorField evolve_steps(SpinorField field, const ModelParams &params, const SchemeConfig &scheme, std::size_t steps)
{
    validate_scheme(params, scheme);
    for (std::size_t n = 1; n <= steps; ++n) step_in_place(field, params, scheme, Direction::forward, n);
    return field;
}

RefinementResult refinement_study(const RefinementProblem &problem, std::size_t levels)
{
    if (levels < 3) throw configuration_error(fmt::format("refinement_study needs >= 3 levels, got {}", levels));
    const double T = problem.scheme.t_final;

    RefinementResult out;
    out.against_oracle = problem.params.preset == Preset::thirring && problem.params.mass == 0.0;

    std::vector<SpinorField> finals;
    finals.reserve(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const Grid g(problem.x_min, problem.x_max, problem.base_cells << l);
        const SpinorField init = build_initial(g, problem.profiles, T);
        finals.push_back(evolve_steps(init, problem.params, problem.scheme, step_count(g, T)));
    }

    std::vector<double> errors;
    if (out.against_oracle) {
        for (std::size_t l = 0; l < levels; ++l) {
            const auto exact = thirring_m0_exact(problem.profiles, problem.params, T, finals[l].grid);
            errors.push_back(l2_distance(finals[l], exact));
        }
    } else {
        for (std::size_t l = 0; l + 1 < levels; ++l) {
            const auto fine = restrict_to_coarse(finals[l + 1], finals[l].grid);
            errors.push_back(l2_distance(finals[l], fine) / (1.0 - 0.25));
        }
    }

    for (std::size_t l = 0; l < errors.size(); ++l) {
        RefinementRow row;
        row.level = l;
        row.n_cells = problem.base_cells << l;
        row.l2_error = errors[l];
        row.observed_order = l == 0 ? std::numeric_limits<double>::quiet_NaN() : std::log2(errors[l - 1] / errors[l]);
        out.rows.push_back(row);
    }
    return out;
}

void write_refinement_csv(std::ostream &os, const RefinementResult &result)
{
    os << "level,n_cells,l2_error,observed_order\n";
    for (const auto &r : result.rows) {
        fmt::print(os, "{},{},{:.17g},{:.17g}\n", r.level, r.n_cells, r.l2_error, r.observed_order);
    }
}

} // namespace diraclab
