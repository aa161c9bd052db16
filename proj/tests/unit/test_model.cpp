#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "diraclab/errors.hpp"
#include "diraclab/model.hpp"

using namespace diraclab;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr cplx I{0.0, 1.0};

bool close(cplx a, cplx b, double tol = 1e-14) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

ConstantsOptions quick(std::size_t samples = 200000)
{
    ConstantsOptions o;
    o.samples = samples;
    return o;
}

} // namespace

TEST_CASE("preset thirring realises u|v|^2")
{
    const auto p = preset(Preset::thirring, 1.0, 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int i = 0; i < 100; ++i) {
        const cplx u{d(rng), d(rng)}, v{d(rng), d(rng)};
        const auto [n1, n2] = eval_N(p, u, v);
        CHECK(close(n1, u * std::norm(v)));
        CHECK(close(n2, v * std::norm(u)));
    }
}

TEST_CASE("preset gross_neveu at u = v = 1 gives N1 = 4")
{
    const auto p = preset(Preset::gross_neveu, 1.0, 0.0);
    const auto [n1, n2] = eval_N(p, 1.0, 1.0);
    CHECK(close(n1, 4.0));
    CHECK(close(n2, 4.0));
}

TEST_CASE("zero coupling gives a linear model")
{
    const auto p = preset(Preset::thirring, 0.0, 1.0);
    const auto [n1, n2] = eval_N(p, {1.5, -2.0}, {0.3, 0.7});
    CHECK(n1 == cplx(0.0));
    CHECK(n2 == cplx(0.0));
}

TEST_CASE("preset rejects negative mass and unknown names")
{
    CHECK_THROWS_AS(preset(Preset::thirring, 1.0, -1.0), configuration_error);
    CHECK_THROWS_AS(preset("sine_gordon", 1.0, 1.0), configuration_error);
    CHECK(preset("gross_neveu", 2.0, 0.5).preset == Preset::gross_neveu);
}

TEST_CASE("eval_N examples")
{
    const auto th = preset(Preset::thirring, 1.0, 1.0);
    auto [a, b] = eval_N(th, 2.0, 1.0);
    CHECK(close(a, 2.0));
    CHECK(close(b, 4.0));

    for (const auto &p : {th, preset(Preset::gross_neveu, 1.0, 1.0)}) {
        const auto [z1, z2] = eval_N(p, 0.0, 0.0);
        CHECK(z1 == cplx(0.0));
        CHECK(z2 == cplx(0.0));
    }

    // conj(u) v + u conj(v) = 0 for u = 1, v = i
    const auto [g1, g2] = eval_N(preset(Preset::gross_neveu, 1.0, 1.0), 1.0, I);
    CHECK(std::abs(g1) < 1e-15);
    CHECK(std::abs(g2) < 1e-15);
}

TEST_CASE("custom product form matches its expansion")
{
    const std::array<cplx, 5> al{cplx(0.3, 0.1), cplx(-0.2, 0.4), 1.0, cplx(0.5, -0.5), cplx(0.1, 0.2)};
    const std::array<cplx, 5> be{cplx(1.0, 0.0), 0.0, cplx(0.7, 0.0), 0.0, cplx(0.0, 0.3)};
    const auto p = custom_model(al, be, 0.0);
    const cplx u{0.4, -1.1}, v{0.9, 0.2};
    const auto [n1, n2] = eval_N(p, u, v);
    const cplx e1 = (al[0] * u + al[1] * std::conj(u)) * (al[2] * std::norm(v) + al[3] * v * v + al[4] * std::conj(v * v));
    const cplx e2 = (be[0] * v + be[1] * std::conj(v)) * (be[2] * std::norm(u) + be[3] * u * u + be[4] * std::conj(u * u));
    CHECK(close(n1, e1, 1e-13));
    CHECK(close(n2, e2, 1e-13));
}

TEST_CASE("a2 residual examples")
{
    const auto th = preset(Preset::thirring, 1.0, 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        const cplx u{d(rng), d(rng)}, v{d(rng), d(rng)};
        const double scale = std::norm(u) * std::norm(v);
        CHECK(std::abs(a2_residual(th, u, v)) <= 8 * eps * scale);
        // Both terms vanish separately for Thirring.
        const auto t = a2_residual_terms(th, u, v);
        CHECK(std::abs(t.first) <= 8 * eps * scale);
        CHECK(std::abs(t.second) <= 8 * eps * scale);
    }

    const auto gn = preset(Preset::gross_neveu, 1.0, 1.0);
    CHECK(std::abs(a2_residual(gn, {1.0, 1.0}, 2.0)) <= 64 * eps);

    std::array<cplx, 5> al{I, 0.0, 1.0, 0.0, 0.0};
    const auto bad = custom_model(al, {}, 0.0);
    CHECK(a2_residual(bad, 1.0, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("sampled a2 report is tiny for presets")
{
    for (auto name : {Preset::thirring, Preset::gross_neveu}) {
        const auto rep = sample_a2(preset(name, 1.0, 0.0), 10000, 5);
        CHECK(rep.samples == 10000);
        CHECK(rep.max_rel <= 1e-12);
    }
}

TEST_CASE("derive_constants for the presets")
{
    SUBCASE("thirring: c = 2|alpha|")
    {
        for (double a : {1.0, -0.5, 3.0}) {
            const auto k = derive_constants(preset(Preset::thirring, a, 1.0), quick());
            CHECK(k.c == doctest::Approx(2.0 * std::abs(a)).epsilon(1e-12));
            CHECK(k.c_sampled == doctest::Approx(2.0 * std::abs(a)).epsilon(1e-12));
        }
    }
    SUBCASE("gross_neveu: c = 8, sampled within 1%")
    {
        const auto k = derive_constants(preset(Preset::gross_neveu, 1.0, 1.0), quick(1000000));
        CHECK(k.c == doctest::Approx(8.0));
        CHECK(k.c_sampled <= 8.0 * (1.0 + 1e-12));
        CHECK(k.c_sampled >= 8.0 * 0.99);
    }
    SUBCASE("alpha = 0: capped delta")
    {
        for (auto name : {Preset::thirring, Preset::gross_neveu}) {
            const auto k = derive_constants(preset(name, 0.0, 1.0), quick(1000));
            CHECK(k.c == 0.0);
            CHECK(k.delta_capped);
            CHECK(k.delta == ConstantsOptions{}.delta_cap);
        }
    }
}

TEST_CASE("derived constants obey their invariants")
{
    for (auto name : {Preset::thirring, Preset::gross_neveu}) {
        for (double a : {0.25, 1.0, 2.0}) {
            const auto k = derive_constants(preset(name, a, 1.0), quick(50000));
            CHECK(k.c_star >= k.c);
            CHECK(k.delta == doctest::Approx(1.0 / (4.0 * k.c_star)));
            CHECK(-2.0 + 2.0 * k.delta * k.c < -1.0);
            // D1 coefficient in the Lyapunov estimate: 2 c* + K (-2 + c* 2 delta) <= -1
            CHECK(2.0 * k.c_star + k.K * (-2.0 + k.c_star * 2.0 * k.delta) <= -1.0);
        }
    }
}

TEST_CASE("derive_constants is deterministic in its seed")
{
    const auto p = preset(Preset::gross_neveu, 1.0, 1.0);
    const auto a = derive_constants(p, quick(20000));
    const auto b = derive_constants(p, quick(20000));
    CHECK(a.c_star == b.c_star);
    CHECK(a.K == b.K);
}

TEST_CASE("models violating the null structure are rejected")
{
    std::array<cplx, 5> al{I, 0.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(derive_constants(custom_model(al, {}, 0.0), quick(1000)), model_rejected);
}

TEST_CASE("a charge-conserving custom model is accepted")
{
    // Thirring written in product form.
    std::array<cplx, 5> al{1.0, 0.0, 1.0, 0.0, 0.0};
    const auto p = custom_model(al, al, 1.0);
    const auto k = derive_constants(p, quick(20000));
    CHECK(k.c == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(cubic_ratio(p, {0.3, 0.1}, {-1.0, 2.0}) == doctest::Approx(2.0));
}
