#include <doctest.h>

#include <cmath>
#include <sstream>

#include "diraclab/errors.hpp"
#include "diraclab/oracles.hpp"

using namespace diraclab;

namespace {

std::vector<ProfileSpec> two_bumps(double a = 1.0)
{
    return {{ProfileKind::gaussian, Component::u, -1.5, 1.0, a, 0.0},
            {ProfileKind::gaussian, Component::v, 1.5, 0.8, a, 0.4}};
}

double max_diff(const SpinorField &a, const SpinorField &b)
{
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        m = std::max({m, std::abs(a.u[j] - b.u[j]), std::abs(a.v[j] - b.v[j])});
    }
    return m;
}

} // namespace

TEST_CASE("closed form with v0 = 0 is a translation of u0")
{
    const Grid g(-10, 10, 400);
    const auto p = preset(Preset::thirring, 1.0, 0.0);
    const std::vector<ProfileSpec> prof{{ProfileKind::gaussian, Component::u, -1.0, 1.0, 1.0, 0.3}};
    const auto e = thirring_m0_exact(prof, p, 2.0, g);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        CHECK(std::abs(e.u[j] - evaluate_profile(prof[0], g.center(j) - 2.0)) < 1e-15);
        CHECK(e.v[j] == cplx(0.0));
    }
}

TEST_CASE("closed form at alpha = 0 is free transport of both components")
{
    const Grid g(-10, 10, 400);
    const auto p = preset(Preset::thirring, 0.0, 0.0);
    const auto prof = two_bumps();
    const auto e = thirring_m0_exact(prof, p, 1.5, g);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        CHECK(std::abs(e.u[j] - evaluate_profile(prof[0], g.center(j) - 1.5)) < 1e-15);
        CHECK(std::abs(e.v[j] - evaluate_profile(prof[1], g.center(j) + 1.5)) < 1e-15);
    }
}

TEST_CASE("closed form keeps moduli and matches the characteristic reference")
{
    const Grid g(-10, 10, 200);
    const auto p = preset(Preset::thirring, 1.0, 0.0);
    const auto prof = two_bumps();
    const auto e = thirring_m0_exact(prof, p, 2.0, g);
    const auto r = thirring_m0_characteristic_reference(prof, p, 2.0, g, 1e-3);
    CHECK(max_diff(e, r) < 1e-9);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        CHECK(std::abs(std::abs(e.u[j]) - std::abs(evaluate_profile(prof[0], g.center(j) - 2.0))) < 1e-14);
    }
}

TEST_CASE("closed form refuses other models")
{
    const Grid g(-10, 10, 64);
    const auto prof = two_bumps();
    CHECK_THROWS_AS(thirring_m0_exact(prof, preset(Preset::thirring, 1.0, 1.0), 1.0, g), configuration_error);
    CHECK_THROWS_AS(thirring_m0_exact(prof, preset(Preset::gross_neveu, 1.0, 0.0), 1.0, g), configuration_error);
}

TEST_CASE("brute force sums: zero and single-cell fields")
{
    const Grid g(0, 1, 16);
    SpinorField z(g);
    CHECK(brute_force_Q0(z) == 0.0);
    CHECK(brute_force_Q1(z, z) == 0.0);

    SpinorField f(g);
    f.u[3] = 2.0;
    f.v[9] = 3.0;
    const double dx = g.dx();
    CHECK(brute_force_Q0(f) == doctest::Approx(36.0 * dx * dx));
    CHECK(bony_Q0(f) == doctest::Approx(36.0 * dx * dx));

    const Grid big(0, 1, 8192);
    CHECK_THROWS_AS(brute_force_Q0(SpinorField(big)), configuration_error);
}

TEST_CASE("l2 distance")
{
    const Grid g(0, 1, 100);
    SpinorField a(g), b(g);
    std::fill(a.u.begin(), a.u.end(), 1.0);
    CHECK(l2_distance(a, a) == 0.0);
    CHECK(l2_distance(a, b) == doctest::Approx(1.0));
    CHECK_THROWS_AS(l2_distance(a, SpinorField(Grid(0, 1, 50))), configuration_error);
}

TEST_CASE("cubic restriction is exact on cubics")
{
    const Grid coarse(-1, 1, 32), fine(-1, 1, 64);
    SpinorField f(fine);
    auto cubic = [](double x) { return cplx(x * x * x - 0.5 * x, x * x); };
    for (std::size_t j = 0; j < fine.n_cells(); ++j) f.u[j] = cubic(fine.center(j));
    const auto c = restrict_to_coarse(f, coarse);
    for (std::size_t j = 1; j + 1 < coarse.n_cells(); ++j) CHECK(std::abs(c.u[j] - cubic(coarse.center(j))) < 1e-14);
    CHECK_THROWS_AS(restrict_to_coarse(f, Grid(-1, 1, 40)), configuration_error);
}

TEST_CASE("refinement: linear massless problem is solved exactly")
{
    RefinementProblem prob;
    prob.params = preset(Preset::thirring, 0.0, 0.0);
    prob.profiles = two_bumps();
    prob.x_min = -16;
    prob.x_max = 16;
    prob.base_cells = 128;
    prob.scheme.t_final = 2.0;
    const auto r = refinement_study(prob, 3);
    CHECK(r.against_oracle);
    REQUIRE(r.rows.size() == 3);
    for (const auto &row : r.rows) CHECK(row.l2_error < 1e-13);
    CHECK_THROWS_AS(refinement_study(prob, 2), configuration_error);
}

TEST_CASE("refinement: massless Thirring converges at second order against the closed form")
{
    RefinementProblem prob;
    prob.params = preset(Preset::thirring, 1.0, 0.0);
    prob.profiles = two_bumps();
    prob.x_min = -16;
    prob.x_max = 16;
    prob.base_cells = 256;
    prob.scheme.t_final = 3.0;
    const auto r = refinement_study(prob, 3);
    REQUIRE(r.rows.size() == 3);
    CHECK(std::isnan(r.rows[0].observed_order));
    for (std::size_t l = 1; l < 3; ++l) {
        CHECK(r.rows[l].observed_order >= 1.9);
        CHECK(r.rows[l].observed_order <= 2.1);
    }
    std::ostringstream os;
    write_refinement_csv(os, r);
    CHECK(os.str().rfind("level,n_cells,l2_error,observed_order\n", 0) == 0);
}

TEST_CASE("refinement: Gross-Neveu Richardson order")
{
    RefinementProblem prob;
    prob.params = preset(Preset::gross_neveu, 1.0, 1.0);
    prob.profiles = two_bumps(0.5);
    prob.x_min = -16;
    prob.x_max = 16;
    prob.base_cells = 256;
    prob.scheme.t_final = 3.0;
    const auto r = refinement_study(prob, 4);
    CHECK_FALSE(r.against_oracle);
    REQUIRE(r.rows.size() == 3);
    for (std::size_t l = 1; l < r.rows.size(); ++l) {
        CHECK(r.rows[l].observed_order >= 1.9);
        CHECK(r.rows[l].observed_order <= 2.1);
    }
}

TEST_CASE("swapping and reflecting the data commutes with the scheme")
{
    const Grid g(-12, 12, 480);
    const auto p = preset(Preset::thirring, 1.0, 1.0);
    SchemeConfig s;
    s.t_final = 2.0;
    const auto a = build_initial(g, two_bumps(0.7));
    SpinorField b(g);
    const std::size_t N = g.n_cells();
    for (std::size_t j = 0; j < N; ++j) {
        b.u[j] = a.v[N - 1 - j];
        b.v[j] = a.u[N - 1 - j];
    }
    const std::size_t n = step_count(g, 2.0);
    const auto ea = evolve_steps(a, p, s, n);
    const auto eb = evolve_steps(b, p, s, n);
    double m = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        m = std::max({m, std::abs(eb.u[j] - ea.v[N - 1 - j]), std::abs(eb.v[j] - ea.u[N - 1 - j])});
    }
    CHECK(m < 1e-13);
}
