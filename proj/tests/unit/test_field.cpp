#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "diraclab/errors.hpp"
#include "diraclab/field.hpp"

using namespace diraclab;

namespace {

ProfileSpec gauss(Component c, double center, double width = 1.0, double a = 1.0)
{
    return {ProfileKind::gaussian, c, center, width, a, 0.0};
}

} // namespace

TEST_CASE("grid validation and geometry")
{
    CHECK_THROWS_AS(Grid(1.0, 1.0, 64), configuration_error);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 4), configuration_error);
    const Grid g(-1.0, 1.0, 8);
    CHECK(g.dx() == 0.25);
    CHECK(g.center(0) == -0.875);
    CHECK(g.nearest_cell(-0.8) == 0);
    CHECK(g.nearest_cell(0.1) == 4);
    CHECK(g.nearest_cell(50.0) == 7);
}

TEST_CASE("zero profiles give the zero field")
{
    const Grid g(-5, 5, 64);
    const auto f = build_initial(g, std::vector<ProfileSpec>{});
    const auto n = norms(f);
    CHECK(n.charge == 0.0);
    CHECK(n.linf_sq == 0.0);
    CHECK(n.h1_semi == 0.0);
    const std::vector<ProfileSpec> z{{ProfileKind::zero, Component::u, 0, 1, 5, 0}};
    CHECK(norms(build_initial(g, z)).charge == 0.0);
}

TEST_CASE("unit gaussian carries charge sqrt(pi/2)")
{
    const Grid g(-20, 20, 4096);
    const std::vector<ProfileSpec> p{gauss(Component::u, 0.0)};
    const auto n = norms(build_initial(g, p));
    CHECK(std::abs(n.charge - std::sqrt(std::numbers::pi / 2.0)) <= 1e-6);
    CHECK(n.linf_sq == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("smooth bump has compact support")
{
    const Grid g(-4, 4, 256);
    const std::vector<ProfileSpec> p{{ProfileKind::smooth_bump, Component::u, 0.0, 1.0, 1.0, 0.0}};
    const auto f = build_initial(g, p);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        if (std::abs(g.center(j)) > 1.0) CHECK(f.u[j] == cplx(0.0));
    }
    CHECK(f.u[g.nearest_cell(0.0)].real() > 0.99);
}

TEST_CASE("constant field norms")
{
    const Grid g(0.0, 1.0, 16);
    SpinorField f(g);
    std::fill(f.u.begin(), f.u.end(), 1.0);
    const auto n = norms(f);
    CHECK(n.charge == doctest::Approx(1.0));
    CHECK(n.linf_sq == 1.0);
    CHECK(n.h1_semi == 0.0);
}

TEST_CASE("profile phase and component routing")
{
    const Grid g(-10, 10, 200);
    std::vector<ProfileSpec> p{gauss(Component::v, 1.0)};
    p[0].phase = std::numbers::pi / 2.0;
    const auto f = build_initial(g, p);
    const std::size_t j = g.nearest_cell(1.0);
    CHECK(f.u[j] == cplx(0.0));
    CHECK(std::abs(f.v[j].real()) < 1e-12);
    CHECK(f.v[j].imag() > 0.99);
}

TEST_CASE("supports must fit, widened by the margin")
{
    const Grid g(-7, 7, 140);
    const std::vector<ProfileSpec> p{gauss(Component::u, 0.0)};
    CHECK_NOTHROW(build_initial(g, p, 0.0));
    CHECK_THROWS_AS(build_initial(g, p, 2.0), domain_too_small);
    const std::vector<ProfileSpec> bad{{ProfileKind::gaussian, Component::u, 0.0, -1.0, 1.0, 0.0}};
    CHECK_THROWS_AS(build_initial(g, bad), configuration_error);
}

TEST_CASE("norms are invariant under shifting interior samples")
{
    const Grid g(-10, 10, 512);
    const std::vector<ProfileSpec> p{gauss(Component::u, -1.0, 0.7, 0.8), gauss(Component::v, 2.0, 1.2, 0.5)};
    const auto f = build_initial(g, p);
    auto s = f;
    std::rotate(s.u.begin(), s.u.begin() + 37, s.u.end());
    std::rotate(s.v.begin(), s.v.begin() + 37, s.v.end());
    CHECK(std::abs(norms(f).charge - norms(s).charge) < 1e-12);
}

TEST_CASE("charge is quadratic in the amplitude")
{
    const Grid g(-10, 10, 256);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    SpinorField f(g);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        f.u[j] = {d(rng), d(rng)};
        f.v[j] = {d(rng), d(rng)};
    }
    auto s = f;
    for (auto &z : s.u) z *= 2.0;
    for (auto &z : s.v) z *= 2.0;
    CHECK(norms(s).charge == 4.0 * norms(f).charge);
}

TEST_CASE("sampled charge converges at second order or better under doubling")
{
    const std::vector<ProfileSpec> p{gauss(Component::u, 0.3, 0.8)};
    const double exact = 0.8 * std::sqrt(std::numbers::pi / 2.0);
    double prev = 0.0;
    for (std::size_t n : {64, 128, 256}) {
        const Grid g(-8, 8, n);
        const double err = std::abs(norms(build_initial(g, p)).charge - exact);
        if (prev > 1e-13) CHECK(err <= prev / 3.5 + 1e-15);
        prev = err;
    }
}

TEST_CASE("snapshot csv layout")
{
    const Grid g(0, 1, 8);
    SpinorField f(g);
    f.u[0] = {1.0, 2.0};
    std::ostringstream os;
    write_snapshot_csv(os, f);
    const auto s = os.str();
    CHECK(s.rfind("x,re_u,im_u,re_v,im_v\n", 0) == 0);
    CHECK(s.find("0.0625,1,2,0,0\n") != std::string::npos);
}
