#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace diraclab {

using cplx = std::complex<double>;

/// Uniform cell-centred mesh on [x_min, x_max].
class Grid {
public:
    Grid() = default;
    Grid(double x_min, double x_max, std::size_t n_cells);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t n_cells() const noexcept { return n_; }
    double dx() const noexcept { return dx_; }
    double center(std::size_t j) const noexcept { return x_min_ + (static_cast<double>(j) + 0.5) * dx_; }

    /// Index of the cell whose centre is nearest to x (clamped to the mesh).
    std::size_t nearest_cell(double x) const noexcept;

    bool operator==(const Grid &) const = default;

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    std::size_t n_ = 8;
    double dx_ = 0.125;
};

/// Complex spinor pair (u, v) sampled at cell centres at time t.
struct SpinorField {
    Grid grid;
    double t = 0.0;
    std::vector<cplx> u;
    std::vector<cplx> v;

    SpinorField() = default;
    explicit SpinorField(const Grid &g, double time = 0.0) : grid(g), t(time), u(g.n_cells()), v(g.n_cells()) {}

    std::size_t size() const noexcept { return u.size(); }
    bool all_finite() const noexcept;
};

enum class ProfileKind { gaussian, smooth_bump, zero };
enum class Component { u, v };

struct ProfileSpec {
    ProfileKind kind = ProfileKind::gaussian;
    Component component = Component::u;
    double center = 0.0;
    double width = 1.0;
    double amplitude = 1.0;
    double phase = 0.0;
};

/// Closed-form value of a single profile at x.
cplx evaluate_profile(const ProfileSpec &p, double x);

/// Half-width outside which the profile is (numerically) zero. Gaussians are cut where
/// their amplitude drops below 1e-16.
double support_radius(const ProfileSpec &p);

/// Samples the sum of the profiles at cell centres. Every profile support, widened by
/// `margin` on both sides, must fit inside the grid (domain_too_small otherwise).
SpinorField build_initial(const Grid &grid, std::span<const ProfileSpec> profiles, double margin = 0.0);

struct Norms {
    double charge = 0.0;
    double linf_sq = 0.0;
    double h1_semi = 0.0;
};

Norms norms(const SpinorField &field);

/// CSV with header x,re_u,im_u,re_v,im_v.
void write_snapshot_csv(std::ostream &os, const SpinorField &field);

} // namespace diraclab
