#include <doctest.h>

#include <cmath>
#include <random>

#include "diraclab/errors.hpp"
#include "diraclab/evolve.hpp"
#include "diraclab/functionals.hpp"
#include "diraclab/oracles.hpp"

using namespace diraclab;

namespace {

SpinorField random_field(const Grid &g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    SpinorField f(g);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        f.u[j] = {d(rng), d(rng)};
        f.v[j] = {d(rng), d(rng)};
    }
    return f;
}

SchemeConfig scheme(double T, std::size_t stride = 4)
{
    SchemeConfig s;
    s.t_final = T;
    s.diagnostics_stride = stride;
    return s;
}

std::vector<ProfileSpec> small_data(double a)
{
    return {{ProfileKind::gaussian, Component::u, -2.0, 1.0, a, 0.0},
            {ProfileKind::gaussian, Component::v, 2.0, 1.0, a, 0.7}};
}

ModelConstants constants_for(const ModelParams &p)
{
    ConstantsOptions o;
    o.samples = 100000;
    return derive_constants(p, o);
}

} // namespace

TEST_CASE("pointwise functionals")
{
    const Grid g(0.0, 1.0, 32);
    SpinorField f(g);
    auto z = pointwise_functionals(f);
    CHECK(z.L0 == 0.0);
    CHECK(z.D0 == 0.0);

    std::fill(f.u.begin(), f.u.end(), 1.0);
    std::fill(f.v.begin(), f.v.end(), 1.0);
    const auto c = pointwise_functionals(f);
    CHECK(c.L0 == doctest::Approx(2.0));
    CHECK(c.D0 == doctest::Approx(1.0));

    SpinorField d(g);
    for (std::size_t j = 0; j < 10; ++j) d.u[j] = 5.0;
    for (std::size_t j = 20; j < 32; ++j) d.v[j] = 7.0;
    CHECK(pointwise_functionals(d).D0 == 0.0);
}

TEST_CASE("bony Q0 orders u before v")
{
    const Grid g(0.0, 4.0, 4000);
    SpinorField f(g);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        const double x = g.center(j);
        if (x < 1.0) f.u[j] = 1.0;
        if (x >= 2.0 && x < 3.0) f.v[j] = 1.0;
    }
    CHECK(bony_Q0(f) == doctest::Approx(1.0).epsilon(1e-12));
    std::swap(f.u, f.v);
    CHECK(bony_Q0(f) == 0.0);
}

TEST_CASE("bony Q0 excludes the diagonal")
{
    const Grid g(0.0, 1.0, 8);
    SpinorField f(g);
    f.u[3] = 1.0;
    f.v[3] = 1.0;
    CHECK(bony_Q0(f) == 0.0);
    CHECK(brute_force_Q0(f) == 0.0);
}

TEST_CASE("bony Q0 agrees with the double sum")
{
    for (std::size_t n : {64, 512, 2048}) {
        const Grid g(-3.0, 5.0, n);
        const auto f = random_field(g, n);
        const double b = brute_force_Q0(f);
        CHECK(std::abs(bony_Q0(f) - b) <= 1e-12 * b);
    }
}

TEST_CASE("Q0 is bounded by the product of component charges")
{
    const Grid g(-3.0, 5.0, 300);
    const auto f = random_field(g, 9);
    const auto cc = component_charges(f);
    const double L0 = pointwise_functionals(f).L0;
    CHECK(bony_Q0(f) <= cc.u * cc.v);
    CHECK(cc.u * cc.v <= L0 * L0 / 4.0 * (1.0 + 1e-14));
}

TEST_CASE("pair functionals")
{
    const Grid g(-4.0, 4.0, 256);
    const auto a = random_field(g, 1);
    auto same = pair_functionals(a, a);
    CHECK(same.L1 == 0.0);
    CHECK(same.Q1 == 0.0);
    CHECK(same.D1 == 0.0);

    const auto z = pair_functionals(a, SpinorField(g));
    CHECK(z.D1 == doctest::Approx(2.0 * pointwise_functionals(a).D0).epsilon(1e-13));
    CHECK(z.L1 == doctest::Approx(pointwise_functionals(a).L0).epsilon(1e-13));

    for (std::size_t n : {128, 512, 2048}) {
        const Grid h(-4.0, 4.0, n);
        const auto p = random_field(h, 10 + n);
        const auto q = random_field(h, 20 + n);
        const double b = brute_force_Q1(p, q);
        CHECK(std::abs(pair_functionals(p, q).Q1 - b) <= 1e-12 * b);
    }

    const Grid other(-4.0, 4.0, 128);
    CHECK_THROWS_AS(pair_functionals(a, SpinorField(other)), configuration_error);
}

TEST_CASE("pair functionals are symmetric in the pair")
{
    const Grid g(-4.0, 4.0, 200);
    const auto a = random_field(g, 3);
    const auto b = random_field(g, 4);
    const auto ab = pair_functionals(a, b);
    const auto ba = pair_functionals(b, a);
    CHECK(ab.L1 == doctest::Approx(ba.L1).epsilon(1e-14));
    CHECK(ab.Q1 == doctest::Approx(ba.Q1).epsilon(1e-14));
    CHECK(ab.D1 == doctest::Approx(ba.D1).epsilon(1e-14));
}

TEST_CASE("q bound and sup envelope formulas")
{
    CHECK(q_bound(0.0, 1.0, 2.0, 0.0) == 0.0);
    const double L = 0.03, m = 1.0, c = 2.0, t = 3.0;
    CHECK(q_bound(t, m, c, L) == doctest::Approx(t * (m * L + 4 * c * m * L * L) + 4 * c * L * L + L));
    const double q = q_bound(t, m, c, L);
    CHECK(linf_envelope(0.5, t, m, c, L) == doctest::Approx((0.5 + 2 * m * q) * std::exp(m * t + 2 * c * q)));
    CHECK(linf_envelope(0.0, 5.0, 0.0, 0.0, 0.0) == 0.0);
    CHECK(linf_envelope(0.7, 5.0, 0.0, 0.0, 0.0) == 0.7);
}

TEST_CASE("zero solution: every record vanishes and every check passes")
{
    const Grid g(-4, 4, 128);
    const auto p = preset(Preset::thirring, 1.0, 1.0);
    const auto k = constants_for(p);
    const auto tr = run_trajectory(SpinorField(g), p, scheme(2.0), k);
    for (const auto &r : tr.records) {
        CHECK(r.L0 == 0.0);
        CHECK(r.Q0 == 0.0);
        CHECK(r.bony_residual == 0.0);
        CHECK(r.gammaR == 0.0);
        CHECK(r.q_bound == 0.0);
        CHECK(r.linf_envelope == 0.0);
    }
    CHECK(bony_budget_check(tr.records, 1.0, k.delta).cumulative.status == Status::pass);
    CHECK(charge_check(tr.records).status == Status::pass);
    const auto s = line_integrals(tr, 0.0, 2.0);
    CHECK(s.gammaR == 0.0);
    CHECK(s.q_bound == 0.0);
}

TEST_CASE("massless budget reduces to Q0 + int D0 <= Q0(0)")
{
    const Grid g(-16, 16, 1024);
    const auto p = preset(Preset::thirring, 1.0, 0.0);
    const auto k = constants_for(p);
    const auto prof = small_data(0.1);
    const auto tr = run_trajectory(build_initial(g, prof, 4.0), p, scheme(4.0), k);
    const double Q00 = tr.records.front().Q0;
    for (const auto &r : tr.records) CHECK(r.bony_budget == Q00);
    CHECK(bony_budget_check(tr.records, 0.0, k.delta).cumulative.status == Status::pass);

    // The closed-form solution has the same moduli, so the same Q0 and D0 up to O(dx^2).
    const auto exact = thirring_m0_exact(prof, p, 4.0, g);
    CHECK(bony_Q0(exact) == doctest::Approx(tr.records.back().Q0).epsilon(1e-3));
    CHECK(bony_Q0(exact) + tr.records.back().int_D0 <= Q00 * (1 + 1e-6));
}

TEST_CASE("small-data runs satisfy the budget, cone and envelope checks")
{
    const Grid g(-20, 20, 2048);
    for (auto name : {Preset::thirring, Preset::gross_neveu}) {
        const auto p = preset(name, 1.0, 1.0);
        const auto k = constants_for(p);
        const double a = name == Preset::thirring ? 0.1 : 0.05;
        const auto tr = run_trajectory(build_initial(g, small_data(a)), p, scheme(5.0), k);
        REQUIRE(tr.records.front().L0 <= k.delta);
        const auto b = bony_budget_check(tr.records, 1.0, k.delta);
        CHECK(b.cumulative.status == Status::pass);
        CHECK(b.differential.status == Status::pass);
        CHECK(line_integral_check(tr.records, k.delta).status == Status::pass);
        CHECK(linf_envelope_check(tr.records, k.delta).status == Status::pass);
        CHECK(charge_check(tr.records).status == Status::pass);
        for (const auto &r : tr.records) {
            const double L = tr.records.front().L0;
            CHECK(r.Q0 <= L * L / 4.0 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("large data: inequality checks are not applicable")
{
    const Grid g(-20, 20, 1024);
    const auto p = preset(Preset::thirring, 1.0, 1.0);
    const auto k = constants_for(p);
    const auto tr = run_trajectory(build_initial(g, small_data(1.0)), p, scheme(2.5), k);
    CHECK(bony_budget_check(tr.records, 1.0, k.delta).cumulative.status == Status::not_applicable);
    CHECK(line_integral_check(tr.records, k.delta).status == Status::not_applicable);
    CHECK(linf_envelope_check(tr.records, k.delta).status == Status::not_applicable);
    // Conservation needs no smallness.
    CHECK(charge_check(tr.records).status == Status::pass);
}

TEST_CASE("null-line integral of translated data equals its flux")
{
    // m = 0, v = 0: |u| is transported, so the integral of |u|^2 across the left-moving
    // line ending at (x0, t0) is 2 * int_0^t0 |u0(x0 - t0 + 2 s ... )|^2 ds, i.e. the charge
    // of u0 on [x0 - t0, x0 + t0].
    const Grid g(-10, 10, 2000);
    const auto p = preset(Preset::thirring, 1.0, 0.0);
    const std::vector<ProfileSpec> prof{{ProfileKind::gaussian, Component::u, -1.0, 1.0, 1.0, 0.0}};
    const auto f = build_initial(g, prof);
    const auto tr = run_trajectory(f, p, scheme(2.0, 1), ModelConstants{});
    const double x0 = 0.5, t0 = 2.0;
    const auto s = line_integrals(tr, x0, t0);
    const std::size_t j = g.nearest_cell(x0);
    const double xc = g.center(j);
    double flux = 0.0;
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
        const double x = g.center(i);
        if (x >= xc - t0 - 1e-9 && x <= xc + t0 + 1e-9) flux += std::norm(f.u[i]) * g.dx();
    }
    CHECK(s.gammaR == doctest::Approx(flux).epsilon(1e-2));
    CHECK(s.gammaL == 0.0);
    CHECK(s.gammaR <= s.q_bound);
}

TEST_CASE("line_integrals rejects cones leaving the mesh and off-snapshot times")
{
    const Grid g(-4, 4, 256);
    const auto p = preset(Preset::thirring, 1.0, 1.0);
    const auto tr = run_trajectory(SpinorField(g), p, scheme(2.0, 4), ModelConstants{});
    CHECK_THROWS_AS(line_integrals(tr, 3.5, 2.0), domain_too_small);
    CHECK_THROWS_AS(line_integrals(tr, 0.0, 0.01), configuration_error);
}

TEST_CASE("stability envelope values at t = 0 and for linear isometric pairs")
{
    ModelConstants k;
    k.c = 0.0;
    k.c_star = 1.0;
    k.K = 3.0;
    k.delta = 0.25;
    PairRecordBuilder b(k, 0.0, 0.01, 0.02);
    const auto r0 = b.make(0.0, {0.5, 0.1, 0.0}, 0.0, 0.0);
    CHECK(r0.h3 == 0.0);
    CHECK(r0.h4 == doctest::Approx(1.0 + 3.0 * 0.03));
    CHECK(r0.lyapunov == doctest::Approx(0.5 + 3.0 * 0.1));
    const auto r1 = b.make(1.0, {0.5, 0.1, 0.0}, 0.0, 0.0);
    CHECK(r1.h3 == 0.0);
    CHECK(r1.h4 == r0.h4);
    CHECK(r1.bound_residual > 0.0);
}
