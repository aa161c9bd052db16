#include "diraclab/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "diraclab/errors.hpp"

namespace diraclab {

Grid::Grid(double x_min, double x_max, std::size_t n_cells) : x_min_(x_min), x_max_(x_max), n_(n_cells)
{
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw configuration_error(fmt::format("grid requires x_min < x_max, got [{}, {}]", x_min, x_max));
    }
    if (n_cells < 8) {
        throw configuration_error(fmt::format("grid requires at least 8 cells, got {}", n_cells));
    }
    dx_ = (x_max - x_min) / static_cast<double>(n_cells);
}

std::size_t Grid::nearest_cell(double x) const noexcept
{
    const double s = std::floor((x - x_min_) / dx_);
    if (s <= 0.0) return 0;
    if (s >= static_cast<double>(n_ - 1)) return n_ - 1;
    return static_cast<std::size_t>(s);
}

bool SpinorField::all_finite() const noexcept
{
    auto fin = [](const cplx &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return std::all_of(u.begin(), u.end(), fin) && std::all_of(v.begin(), v.end(), fin);
}

cplx evaluate_profile(const ProfileSpec &p, double x)
{
    const cplx rot = std::polar(1.0, p.phase);
    const double s = (x - p.center) / p.width;
    switch (p.kind) {
        case ProfileKind::zero:
            return 0.0;
        case ProfileKind::gaussian:
            return p.amplitude * std::exp(-s * s) * rot;
        case ProfileKind::smooth_bump: {
            if (std::abs(s) >= 1.0) return 0.0;
            return p.amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s)) * rot;
        }
    }
    return 0.0;
}

double support_radius(const ProfileSpec &p)
{
    switch (p.kind) {
        case ProfileKind::zero:
            return 0.0;
        case ProfileKind::smooth_bump:
            return p.width;
        case ProfileKind::gaussian: {
            const double a = std::abs(p.amplitude);
            if (a <= 1.0e-16) return 0.0;
            return p.width * std::sqrt(std::log(a / 1.0e-16));
        }
    }
    return 0.0;
}

SpinorField build_initial(const Grid &grid, std::span<const ProfileSpec> profiles, double margin)
{
    SpinorField f(grid, 0.0);
    for (const auto &p : profiles) {
        if (p.kind == ProfileKind::zero) continue;
        if (!(p.width > 0.0)) {
            throw configuration_error(fmt::format("profile width must be positive, got {}", p.width));
        }
        const double r = support_radius(p);
        if (r > 0.0 && (p.center - r - margin < grid.x_min() || p.center + r + margin > grid.x_max())) {
            throw domain_too_small(fmt::format("profile support [{}, {}] widened by {} leaves the domain [{}, {}]",
                                               p.center - r, p.center + r, margin, grid.x_min(), grid.x_max()));
        }
        auto &dst = p.component == Component::u ? f.u : f.v;
        for (std::size_t j = 0; j < grid.n_cells(); ++j) {
            dst[j] += evaluate_profile(p, grid.center(j));
        }
    }
    return f;
}

Norms norms(const SpinorField &field)
{
    Norms n;
    const std::size_t N = field.size();
    const double dx = field.grid.dx();
    double charge = 0.0;
    double h1 = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double m = std::norm(field.u[j]) + std::norm(field.v[j]);
        charge += m;
        n.linf_sq = std::max(n.linf_sq, m);
    }
    auto deriv = [&](const std::vector<cplx> &w, std::size_t j) {
        if (j == 0) return (w[1] - w[0]) / dx;
        if (j == N - 1) return (w[N - 1] - w[N - 2]) / dx;
        return (w[j + 1] - w[j - 1]) / (2.0 * dx);
    };
    if (N >= 2) {
        for (std::size_t j = 0; j < N; ++j) {
            h1 += std::norm(deriv(field.u, j)) + std::norm(deriv(field.v, j));
        }
    }
    n.charge = charge * dx;
    n.h1_semi = h1 * dx;
    return n;
}

void write_snapshot_csv(std::ostream &os, const SpinorField &field)
{
    os << "x,re_u,im_u,re_v,im_v\n";
    for (std::size_t j = 0; j < field.size(); ++j) {
        fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", field.grid.center(j), field.u[j].real(),
                   field.u[j].imag(), field.v[j].real(), field.v[j].imag());
    }
}

} // namespace diraclab
